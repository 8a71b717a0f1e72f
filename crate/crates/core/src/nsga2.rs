//! Constrained NSGA-II: fast non-dominated sorting under the
//! constrained-domination rule, crowding distance, binary tournaments, SBX
//! crossover, polynomial mutation and elitist (mu + lambda) survival.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::doe::BoxDomain;
use crate::pareto::{self, ParetoArchive};
use crate::problems::{constraint_violation, Evaluation, EvaluatorError, Problem, ProblemDims};
use crate::rng::{self, StreamRng};
use crate::surrogate::SurrogateBundle;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nsga2Config {
    /// Even population size.
    pub population: usize,
    pub generations: usize,
    pub crossover_eta: f64,
    pub crossover_prob: f64,
    pub mutation_eta: f64,
    /// Per-variable mutation probability; `None` means `1/d`.
    pub mutation_prob: Option<f64>,
    /// `|h| <= eq_tolerance` counts as satisfied.
    pub eq_tolerance: f64,
    pub seed: u64,
}

impl Default for Nsga2Config {
    fn default() -> Self {
        Self {
            population: 100,
            generations: 50,
            crossover_eta: 15.0,
            crossover_prob: 0.9,
            mutation_eta: 20.0,
            mutation_prob: None,
            eq_tolerance: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Nsga2Error {
    #[error("population must be even and at least 2, got {0}")]
    Population(usize),
    #[error("probabilities must lie in [0, 1]")]
    Probability,
    #[error(transparent)]
    Evaluator(#[from] EvaluatorError),
}

/// `a` constrained-dominates `b`.
pub fn constrained_dominates(fa: &[f64], va: f64, fb: &[f64], vb: f64) -> bool {
    match (va > 0.0, vb > 0.0) {
        (false, true) => true,
        (true, false) => false,
        (true, true) => va < vb,
        (false, false) => pareto::dominates(fa, fb),
    }
}

/// Partitions indices into constrained-domination fronts, best first.
pub fn fast_nondominated_sort(objectives: &[Vec<f64>], violations: &[f64]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    debug_assert_eq!(n, violations.len());
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if constrained_dominates(&objectives[i], violations[i], &objectives[j], violations[j]) {
                dominated_by[i].push(j);
                count[j] += 1;
            } else if constrained_dominates(&objectives[j], violations[j], &objectives[i], violations[i]) {
                dominated_by[j].push(i);
                count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                count[j] -= 1;
                if count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of one front; boundary points get
/// infinity.
pub fn crowding_distance(front: &[Vec<f64>]) -> Vec<f64> {
    let k = front.len();
    let mut dist = vec![0.0; k];
    if k <= 2 {
        return vec![f64::INFINITY; k];
    }
    let m = front[0].len();
    let mut order: Vec<usize> = (0..k).collect();
    for j in 0..m {
        order.sort_by(|&a, &b| front[a][j].total_cmp(&front[b][j]));
        let lo = front[order[0]][j];
        let hi = front[order[k - 1]][j];
        dist[order[0]] = f64::INFINITY;
        dist[order[k - 1]] = f64::INFINITY;
        if !(hi > lo) {
            continue;
        }
        for w in 1..(k - 1) {
            dist[order[w]] += (front[order[w + 1]][j] - front[order[w - 1]][j]) / (hi - lo);
        }
    }
    dist
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nsga2Result {
    /// Feasible non-dominated members of the final population (or the
    /// least-violating front when nothing feasible was found).
    pub archive: ParetoArchive,
    pub feasible: bool,
    pub population: Vec<Individual>,
    pub evaluations: usize,
}

fn evaluate<P: Problem + ?Sized>(problem: &P, x: Vec<f64>, eq_tol: f64) -> Result<Individual, EvaluatorError> {
    let e = problem.evaluate(&x)?;
    Ok(Individual {
        violation: constraint_violation(&e.g, &e.h, eq_tol),
        f: e.f,
        x,
    })
}

struct Ranked {
    rank: Vec<usize>,
    crowding: Vec<f64>,
}

fn rank_population(pop: &[Individual]) -> (Vec<Vec<usize>>, Ranked) {
    let objs: Vec<Vec<f64>> = pop.iter().map(|i| i.f.clone()).collect();
    let viol: Vec<f64> = pop.iter().map(|i| i.violation).collect();
    let fronts = fast_nondominated_sort(&objs, &viol);
    let mut rank = vec![0; pop.len()];
    let mut crowding = vec![0.0; pop.len()];
    for (r, front) in fronts.iter().enumerate() {
        let pts: Vec<Vec<f64>> = front.iter().map(|&i| objs[i].clone()).collect();
        for (&i, c) in front.iter().zip(crowding_distance(&pts)) {
            rank[i] = r;
            crowding[i] = c;
        }
    }
    (fronts, Ranked { rank, crowding })
}

fn tournament(ranked: &Ranked, rng: &mut StreamRng) -> usize {
    let n = ranked.rank.len();
    let a = rng.random_range(0..n);
    let b = rng.random_range(0..n);
    match ranked.rank[a].cmp(&ranked.rank[b]) {
        Ordering::Less => a,
        Ordering::Greater => b,
        Ordering::Equal => {
            if ranked.crowding[b] > ranked.crowding[a] {
                b
            } else {
                a
            }
        }
    }
}

fn sbx(p1: &[f64], p2: &[f64], domain: &BoxDomain, eta: f64, rng: &mut StreamRng) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for i in 0..p1.len() {
        if rng.random::<f64>() > 0.5 || (p1[i] - p2[i]).abs() <= 1e-14 {
            continue;
        }
        let (lb, ub) = (domain.lower()[i], domain.upper()[i]);
        let (y1, y2) = if p1[i] < p2[i] { (p1[i], p2[i]) } else { (p2[i], p1[i]) };
        let u: f64 = rng.random();
        let spread = |beta: f64| {
            let alpha = 2.0 - libm::pow(beta, -(eta + 1.0));
            if u <= 1.0 / alpha {
                libm::pow(u * alpha, 1.0 / (eta + 1.0))
            } else {
                libm::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0))
            }
        };
        let bq1 = spread(1.0 + 2.0 * (y1 - lb) / (y2 - y1));
        let bq2 = spread(1.0 + 2.0 * (ub - y2) / (y2 - y1));
        let a = (0.5 * ((y1 + y2) - bq1 * (y2 - y1))).clamp(lb, ub);
        let b = (0.5 * ((y1 + y2) + bq2 * (y2 - y1))).clamp(lb, ub);
        if rng.random::<f64>() < 0.5 {
            c1[i] = b;
            c2[i] = a;
        } else {
            c1[i] = a;
            c2[i] = b;
        }
    }
    (c1, c2)
}

fn polynomial_mutation(x: &mut [f64], domain: &BoxDomain, eta: f64, prob: f64, rng: &mut StreamRng) {
    for i in 0..x.len() {
        if rng.random::<f64>() >= prob {
            continue;
        }
        let (lb, ub) = (domain.lower()[i], domain.upper()[i]);
        let w = ub - lb;
        let d1 = (x[i] - lb) / w;
        let d2 = (ub - x[i]) / w;
        let u: f64 = rng.random();
        let p = 1.0 / (eta + 1.0);
        let dq = if u < 0.5 {
            let v = 2.0 * u + (1.0 - 2.0 * u) * libm::pow(1.0 - d1, eta + 1.0);
            libm::pow(v, p) - 1.0
        } else {
            let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * libm::pow(1.0 - d2, eta + 1.0);
            1.0 - libm::pow(v, p)
        };
        x[i] = (x[i] + dq * w).clamp(lb, ub);
    }
}

/// Keeps `n` individuals: whole fronts first, then the most isolated
/// members of the front that does not fit.
fn survive(pop: Vec<Individual>, n: usize) -> Vec<Individual> {
    let (fronts, ranked) = rank_population(&pop);
    let mut keep = Vec::with_capacity(n);
    for front in fronts {
        if keep.len() + front.len() <= n {
            keep.extend(front);
        } else {
            let mut f = front;
            f.sort_by(|&a, &b| ranked.crowding[b].total_cmp(&ranked.crowding[a]).then(a.cmp(&b)));
            f.truncate(n - keep.len());
            keep.extend(f);
        }
        if keep.len() == n {
            break;
        }
    }
    let mut slots: Vec<Option<Individual>> = pop.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().expect("unique index")).collect()
}

/// Runs NSGA-II on `problem` over its domain.
pub fn run_nsga2<P: Problem + ?Sized>(problem: &P, config: &Nsga2Config) -> Result<Nsga2Result, Nsga2Error> {
    if config.population < 2 || config.population % 2 != 0 {
        return Err(Nsga2Error::Population(config.population));
    }
    let domain = problem.domain().clone();
    let d = domain.dim();
    let pm = config.mutation_prob.unwrap_or(1.0 / d as f64);
    if !(0.0..=1.0).contains(&pm) || !(0.0..=1.0).contains(&config.crossover_prob) {
        return Err(Nsga2Error::Probability);
    }
    let mut rng = rng::stream(config.seed, &[0x2A5A]);
    let mut evaluations = 0;

    let mut pop = Vec::with_capacity(config.population);
    for _ in 0..config.population {
        let x: Vec<f64> = (0..d)
            .map(|i| domain.lower()[i] + rng.random::<f64>() * domain.width(i))
            .collect();
        pop.push(evaluate(problem, x, config.eq_tolerance)?);
        evaluations += 1;
    }

    for _ in 0..config.generations {
        let (_, ranked) = rank_population(&pop);
        let mut offspring = Vec::with_capacity(config.population);
        while offspring.len() < config.population {
            let a = tournament(&ranked, &mut rng);
            let b = tournament(&ranked, &mut rng);
            let (mut c1, mut c2) = if rng.random::<f64>() < config.crossover_prob {
                sbx(&pop[a].x, &pop[b].x, &domain, config.crossover_eta, &mut rng)
            } else {
                (pop[a].x.clone(), pop[b].x.clone())
            };
            polynomial_mutation(&mut c1, &domain, config.mutation_eta, pm, &mut rng);
            polynomial_mutation(&mut c2, &domain, config.mutation_eta, pm, &mut rng);
            offspring.push(evaluate(problem, c1, config.eq_tolerance)?);
            offspring.push(evaluate(problem, c2, config.eq_tolerance)?);
            evaluations += 2;
        }
        pop.extend(offspring);
        pop = survive(pop, config.population);
    }

    let feasible: Vec<&Individual> = pop.iter().filter(|i| i.violation == 0.0).collect();
    let (archive, any_feasible) = if feasible.is_empty() {
        let objs: Vec<Vec<f64>> = pop.iter().map(|i| i.f.clone()).collect();
        let viol: Vec<f64> = pop.iter().map(|i| i.violation).collect();
        let first = &fast_nondominated_sort(&objs, &viol)[0];
        let f: Vec<Vec<f64>> = first.iter().map(|&i| pop[i].f.clone()).collect();
        let x: Vec<Vec<f64>> = first.iter().map(|&i| pop[i].x.clone()).collect();
        (pareto::nondominated_filter_with_designs(&f, &x), false)
    } else {
        let f: Vec<Vec<f64>> = feasible.iter().map(|i| i.f.clone()).collect();
        let x: Vec<Vec<f64>> = feasible.iter().map(|i| i.x.clone()).collect();
        (pareto::nondominated_filter_with_designs(&f, &x), true)
    };
    Ok(Nsga2Result {
        archive,
        feasible: any_feasible,
        population: pop,
        evaluations,
    })
}

/// The problem defined by the surrogate means of every output.
pub struct SurrogateMeanProblem<'a> {
    bundle: &'a SurrogateBundle,
    domain: BoxDomain,
    name: String,
}

impl<'a> SurrogateMeanProblem<'a> {
    pub fn new(bundle: &'a SurrogateBundle, domain: BoxDomain) -> Self {
        Self {
            bundle,
            domain,
            name: "surrogate-mean".into(),
        }
    }
}

impl Problem for SurrogateMeanProblem<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn dims(&self) -> ProblemDims {
        ProblemDims {
            d: self.domain.dim(),
            n: self.bundle.objectives.len(),
            p: self.bundle.ineq_constraints.len(),
            m: self.bundle.eq_constraints.len(),
        }
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn evaluate(&self, x: &[f64]) -> Result<Evaluation, EvaluatorError> {
        let mean = |gps: &[crate::surrogate::GaussianProcess]| gps.iter().map(|gp| gp.predict_mean(x)).collect();
        Ok(Evaluation {
            f: mean(&self.bundle.objectives),
            g: mean(&self.bundle.ineq_constraints),
            h: mean(&self.bundle.eq_constraints),
        })
    }
}

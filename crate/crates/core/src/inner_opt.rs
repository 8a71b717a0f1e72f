//! Maximization of an infill criterion over the approximate feasible domain.
//!
//! A Latin hypercube screening pool ranks candidate starts; the best
//! `starts` of them are refined by bounded Nelder-Mead. Points are compared
//! lexicographically: feasible before infeasible, then by criterion value
//! (feasible) or by smaller surrogate violation (infeasible). When nothing
//! feasible is found the least-violating point is returned.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::acquisition::{psi, regularize, AcquisitionContext, AcquisitionKind, Criterion, Regularization};
use crate::doe::{self, BoxDomain, Dataset};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerConfig {
    /// Local refinements per solve.
    pub starts: usize,
    /// Criterion evaluations per local refinement.
    pub evals_per_start: usize,
    /// Size of the screening pool the starts are drawn from.
    pub screen_points: usize,
    pub seed: u64,
}

impl Default for InnerConfig {
    fn default() -> Self {
        Self {
            starts: 20,
            evals_per_start: 200,
            screen_points: 1000,
            seed: 0,
        }
    }
}

/// Ordering key: feasibility first, then value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Score {
    pub feasible: bool,
    pub value: f64,
}

impl Score {
    fn of(value: f64, violation: f64) -> Self {
        if violation > 0.0 {
            Score {
                feasible: false,
                value: if violation.is_nan() { f64::NEG_INFINITY } else { -violation },
            }
        } else {
            Score {
                feasible: true,
                value: if value.is_nan() { f64::NEG_INFINITY } else { value },
            }
        }
    }
}

/// A criterion to maximize subject to a violation measure (0 = feasible).
pub trait InfillObjective: Sync {
    /// `(criterion value, violation)`. The value is ignored for infeasible
    /// points and may be left at 0 there.
    fn evaluate(&self, x: &[f64]) -> (f64, f64);
}

impl<F: Fn(&[f64]) -> (f64, f64) + Sync> InfillObjective for F {
    fn evaluate(&self, x: &[f64]) -> (f64, f64) {
        self(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerResult {
    pub x: Vec<f64>,
    /// Criterion value at `x` (meaningful when `feasible`).
    pub value: f64,
    pub violation: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone)]
pub struct NmResult<K> {
    pub x: Vec<f64>,
    pub value: K,
    pub evals: usize,
}

fn key_cmp<K: PartialOrd>(a: &K, b: &K) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Bounded Nelder-Mead maximizing `f`; trial points are projected onto the
/// box. Only comparisons of `K` are used.
pub fn nelder_mead<K, F>(
    mut f: F,
    start: &[f64],
    step: f64,
    lower: &[f64],
    upper: &[f64],
    max_evals: usize,
    xtol: f64,
) -> NmResult<K>
where
    K: PartialOrd + Copy,
    F: FnMut(&[f64]) -> K,
{
    let n = start.len();
    let clip = |x: &mut Vec<f64>| {
        for i in 0..n {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut x0 = start.to_vec();
    clip(&mut x0);
    let mut simplex = vec![x0.clone()];
    for i in 0..n {
        let mut v = x0.clone();
        let span = (upper[i] - lower[i]) * step;
        v[i] = if v[i] + span <= upper[i] { v[i] + span } else { v[i] - span };
        clip(&mut v);
        simplex.push(v);
    }
    let mut values: Vec<K> = simplex.iter().map(|v| eval(v, &mut evals)).collect();

    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| key_cmp(&values[b], &values[a]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread < xtol {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect();
            clip(&mut p);
            p
        };

        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr > values[0] {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            if fe > fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr > values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr > values[n] {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals);
            let ok = !(fc < fr);
            (xc, fc, ok)
        } else {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals);
            let ok = fc > values[n];
            (xc, fc, ok)
        };
        if accept {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        for i in 1..=n {
            let mut v: Vec<f64> = (0..n).map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j])).collect();
            clip(&mut v);
            values[i] = eval(&v, &mut evals);
            simplex[i] = v;
        }
    }

    let best = (0..=n)
        .max_by(|&a, &b| key_cmp(&values[a], &values[b]).then(b.cmp(&a)))
        .expect("non-empty simplex");
    NmResult {
        x: simplex[best].clone(),
        value: values[best],
        evals,
    }
}

/// Multi-start maximization of `objective` over `domain`.
///
/// Deterministic for a given `config.seed`; the screening pool does not
/// depend on `config.starts`, so more starts never give a worse result.
pub fn maximize_acquisition<O: InfillObjective + ?Sized>(
    objective: &O,
    domain: &BoxDomain,
    config: &InnerConfig,
) -> InnerResult {
    let d = domain.dim();
    let mut rng = rng::stream(config.seed, &[0x5C4EE7]);
    let pool = doe::lhs_sample_with(domain, config.screen_points.max(1), &mut rng).expect("non-empty pool");
    let score_at = |x: &[f64]| {
        let (v, viol) = objective.evaluate(x);
        Score::of(v, viol)
    };
    let scored: Vec<Score> = pool.iter().map(|x| score_at(x)).collect();
    let mut ranked: Vec<usize> = (0..pool.len()).collect();
    ranked.sort_by(|&a, &b| key_cmp(&scored[b], &scored[a]).then(a.cmp(&b)));
    ranked.truncate(config.starts.max(1));

    let unit_lower = vec![0.0; d];
    let unit_upper = vec![1.0; d];
    let refine = |&i: &usize| -> (Vec<f64>, Score) {
        let res = nelder_mead(
            |u: &[f64]| score_at(&domain.denormalize(u)),
            &domain.normalize(&pool[i]),
            0.05,
            &unit_lower,
            &unit_upper,
            config.evals_per_start,
            1e-9,
        );
        let mut x = domain.denormalize(&res.x);
        domain.clip(&mut x);
        let s = score_at(&x);
        if key_cmp(&s, &scored[i]) == Ordering::Less {
            (pool[i].clone(), scored[i])
        } else {
            (x, s)
        }
    };
    #[cfg(feature = "parallel")]
    let refined: Vec<(Vec<f64>, Score)> = {
        use rayon::prelude::*;
        ranked.par_iter().map(refine).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let refined: Vec<(Vec<f64>, Score)> = ranked.iter().map(refine).collect();

    // Running best in start order; ties keep the earlier start.
    let mut best = refined[0].clone();
    for cand in refined.into_iter().skip(1) {
        if key_cmp(&cand.1, &best.1) == Ordering::Greater {
            best = cand;
        }
    }
    let (x, _) = best;
    let (value, violation) = objective.evaluate(&x);
    InnerResult {
        feasible: violation == 0.0,
        x,
        value,
        violation,
    }
}

/// Raw criterion restricted to the approximate feasible domain.
pub struct RawInfill<'c, 'a> {
    pub ctx: &'c AcquisitionContext<'a>,
    pub criterion: Criterion,
}

impl RawInfill<'_, '_> {
    /// The criterion itself at `x`, ignoring feasibility.
    pub fn alpha(&self, x: &[f64]) -> f64 {
        self.ctx.alpha(self.criterion, &self.ctx.predict(x))
    }
}

impl InfillObjective for RawInfill<'_, '_> {
    fn evaluate(&self, x: &[f64]) -> (f64, f64) {
        let violation = self.ctx.violation(x);
        if violation > 0.0 {
            return (0.0, violation);
        }
        let (mu, sigma) = self.ctx.surrogates().predict_objectives(x);
        let pred = crate::acquisition::Prediction { mu, sigma, violation };
        (self.ctx.alpha(self.criterion, &pred), 0.0)
    }
}

/// `gamma * alpha(x) - psi(mu(x))` restricted to the feasible domain.
pub struct RegularizedInfill<'c, 'a> {
    pub ctx: &'c AcquisitionContext<'a>,
    pub criterion: Criterion,
    pub regularization: Regularization,
    pub gamma: f64,
}

impl InfillObjective for RegularizedInfill<'_, '_> {
    fn evaluate(&self, x: &[f64]) -> (f64, f64) {
        let violation = self.ctx.violation(x);
        if violation > 0.0 {
            return (0.0, violation);
        }
        let (mu, sigma) = self.ctx.surrogates().predict_objectives(x);
        let reg = psi(&mu, self.regularization);
        let pred = crate::acquisition::Prediction { mu, sigma, violation };
        (regularize(self.ctx.alpha(self.criterion, &pred), reg, self.gamma), 0.0)
    }
}

/// Probability of satisfying every inequality constraint, unconstrained.
pub struct FeasibilitySearch<'c, 'a> {
    pub ctx: &'c AcquisitionContext<'a>,
}

impl InfillObjective for FeasibilitySearch<'_, '_> {
    fn evaluate(&self, x: &[f64]) -> (f64, f64) {
        (self.ctx.probability_of_feasibility(x), 0.0)
    }
}

/// Outcome of one enrichment sub-problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Enrichment {
    pub x: Vec<f64>,
    /// Raw criterion at `x`.
    pub alpha: f64,
    /// Maximized objective value (equals `alpha` when unregularized).
    pub objective: f64,
    /// Scale of the regularized criterion; 1 when unregularized.
    pub gamma: f64,
    pub feasible: bool,
}

/// Solves the enrichment problem for `kind`. Regularized criteria take two
/// phases over the same screening pool: the raw maximizer sets `gamma`,
/// then the regularized criterion is maximized.
pub fn solve_enrichment(
    ctx: &AcquisitionContext<'_>,
    kind: &AcquisitionKind,
    domain: &BoxDomain,
    config: &InnerConfig,
) -> Enrichment {
    let raw_obj = RawInfill {
        ctx,
        criterion: kind.criterion,
    };
    let raw = maximize_acquisition(&raw_obj, domain, config);
    let raw_alpha = raw_obj.alpha(&raw.x);
    if kind.regularization == Regularization::None || !raw.feasible {
        return Enrichment {
            alpha: raw_alpha,
            objective: raw_alpha,
            gamma: 1.0,
            feasible: raw.feasible,
            x: raw.x,
        };
    }
    let gamma = ctx.estimate_gamma(&raw.x, raw_alpha, kind.beta, kind.regularization);
    let reg = maximize_acquisition(
        &RegularizedInfill {
            ctx,
            criterion: kind.criterion,
            regularization: kind.regularization,
            gamma,
        },
        domain,
        config,
    );
    Enrichment {
        alpha: raw_obj.alpha(&reg.x),
        x: reg.x,
        objective: reg.value,
        gamma,
        feasible: reg.feasible,
    }
}

/// Returns `x` unchanged unless it duplicates a dataset row; then a point at
/// normalized distance `1e-3` along a random direction, clipped to the
/// domain, that is not a duplicate.
pub fn dedupe_or_perturb(x: &[f64], dataset: &Dataset, domain: &BoxDomain, seed: u64) -> Vec<f64> {
    if dataset.find_duplicate(x).is_none() {
        return x.to_vec();
    }
    let mut rng = rng::stream(seed, &[0xDED0]);
    let u0 = domain.normalize(x);
    let mut radius = 1e-3;
    loop {
        for _ in 0..32 {
            let mut dir: Vec<f64> = (0..u0.len()).map(|_| rng::standard_normal(&mut rng)).collect();
            let norm = libm::sqrt(dir.iter().map(|v| v * v).sum::<f64>());
            if !(norm > 0.0) {
                continue;
            }
            dir.iter_mut().for_each(|v| *v /= norm);
            for sign in [1.0, -1.0] {
                let u: Vec<f64> = u0
                    .iter()
                    .zip(&dir)
                    .map(|(a, b)| (a + sign * radius * b).clamp(0.0, 1.0))
                    .collect();
                let mut cand = domain.denormalize(&u);
                domain.clip(&mut cand);
                if dataset.find_duplicate(&cand).is_none() {
                    return cand;
                }
            }
        }
        // Crowded neighbourhood: widen the search.
        radius *= 2.0;
        if radius > 1.0 {
            let mut cand: Vec<f64> = (0..u0.len()).map(|_| rng.random::<f64>()).collect();
            cand = domain.denormalize(&cand);
            return cand;
        }
    }
}

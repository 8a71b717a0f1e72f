//! The optimization loop and the multi-seed experiment protocol.

use std::time::Instant;

use mobo_core::acquisition::{reference_point, AcquisitionContext, Criterion};
use mobo_core::doe::{lhs_sample, Dataset};
use mobo_core::inner_opt::{
    dedupe_or_perturb, maximize_acquisition, solve_enrichment, Enrichment, FeasibilitySearch, InnerConfig,
};
use mobo_core::nsga2::{run_nsga2, Nsga2Config, SurrogateMeanProblem};
use mobo_core::pareto::{igd_plus, nondominated_filter, reference_front, ParetoArchive, ReferenceFront};
use mobo_core::problems::Problem;
use mobo_core::rng::derive_seed;
use mobo_core::surrogate::{GpConfig, SurrogateBundle};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::DriverError;

const TAG_DOE: u64 = 1;
const TAG_GP: u64 = 2;
const TAG_INNER: u64 = 3;
const TAG_DEDUPE: u64 = 4;
const TAG_FRONT: u64 = 5;

/// One evaluated design point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    /// 1-based enrichment index.
    pub iteration: usize,
    pub sample: Sample,
    /// Raw criterion at the chosen point (probability of feasibility while
    /// no feasible point is known).
    pub alpha: f64,
    pub gamma: f64,
    /// Whether the point lies in the surrogate feasible domain.
    pub model_feasible: bool,
    /// Whether the pure feasibility search chose this point.
    pub bootstrap: bool,
    /// Size of the archive the criterion was built on.
    pub archive_size: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub acquisition: String,
    pub seed: u64,
    pub total_budget: usize,
    pub doe_size: usize,
    pub initial: Vec<Sample>,
    pub rows: Vec<IterationRow>,
    /// IGD+ of the evaluated feasible non-dominated set after each
    /// enrichment; `None` before the first feasible point or without an
    /// analytic front.
    pub igd_trace: Vec<Option<f64>>,
    /// Front of NSGA-II run on the final surrogate means.
    pub final_front: Vec<Vec<f64>>,
    pub final_designs: Vec<Vec<f64>>,
    /// IGD+ of `final_front`, the reported final score.
    pub front_igd: Option<f64>,
    /// Set when the run stopped early.
    pub incomplete: Option<String>,
}

impl RunRecord {
    pub fn evaluations(&self) -> usize {
        self.initial.len() + self.rows.len()
    }

    /// Every evaluated sample in evaluation order.
    pub fn samples(&self) -> impl Iterator<Item = &Sample> {
        self.initial.iter().chain(self.rows.iter().map(|r| &r.sample))
    }

    /// Feasible non-dominated evaluated objectives after `k` enrichments.
    pub fn archive_after(&self, k: usize) -> ParetoArchive {
        let pts: Vec<Vec<f64>> = self
            .samples()
            .take(self.initial.len() + k)
            .filter(|s| s.feasible)
            .map(|s| s.f.clone())
            .collect();
        nondominated_filter(&pts)
    }

    /// Last value of the evaluated-point trace.
    pub fn trace_end(&self) -> Option<f64> {
        self.igd_trace.last().copied().flatten()
    }
}

fn archive_of(ds: &Dataset, feasible: &[bool]) -> ParetoArchive {
    let pts: Vec<Vec<f64>> = ds
        .objectives()
        .iter()
        .zip(feasible)
        .filter(|(_, &ok)| ok)
        .map(|(f, _)| f.clone())
        .collect();
    nondominated_filter(&pts)
}

/// The analytic reference front for benchmark problems.
pub fn reference_for(problem: &dyn Problem, size: usize) -> Option<ReferenceFront> {
    problem.benchmark()?;
    reference_front(problem, size).ok()
}

struct Loop<'p> {
    problem: &'p dyn Problem,
    config: &'p RunConfig,
    seed: u64,
    reference: Option<ReferenceFront>,
    ds: Dataset,
    feasible: Vec<bool>,
    record: RunRecord,
}

impl Loop<'_> {
    fn score(&self) -> Option<f64> {
        let z = self.reference.as_ref()?;
        let a = archive_of(&self.ds, &self.feasible);
        if a.is_empty() {
            return None;
        }
        igd_plus(a.members(), z.points()).ok()
    }

    fn fit(&self, tag: u64) -> Result<SurrogateBundle, mobo_core::surrogate::GpError> {
        let cfg = GpConfig {
            seed: derive_seed(self.seed, &[TAG_GP, tag]),
            ..self.config.gp.clone()
        };
        SurrogateBundle::fit(&self.ds, &cfg)
    }

    fn step(&mut self, iteration: usize) -> Result<(), DriverError> {
        let start = Instant::now();
        let bundle = self
            .fit(iteration as u64)
            .map_err(|source| DriverError::Surrogate { iteration, source })?;
        let archive = archive_of(&self.ds, &self.feasible);
        let domain = self.ds.domain().clone();
        let inner = InnerConfig {
            seed: derive_seed(self.seed, &[TAG_INNER, iteration as u64]),
            ..self.config.inner
        };
        let kind = &self.config.acquisition;
        let reference = if kind.criterion == Criterion::Ehvi {
            let feas: Vec<Vec<f64>> = self
                .ds
                .objectives()
                .iter()
                .zip(&self.feasible)
                .filter(|(_, &ok)| ok)
                .map(|(f, _)| f.clone())
                .collect();
            reference_point(&feas)
        } else {
            None
        };
        let mut ctx = AcquisitionContext::new(&bundle, &archive, reference)
            .map_err(|source| DriverError::Acquisition { iteration, source })?;
        ctx.eq_tolerance = self.config.eq_tolerance;
        ctx.kappa = self.config.kappa;

        let bootstrap = archive.is_empty();
        let choice = if bootstrap {
            let r = maximize_acquisition(&FeasibilitySearch { ctx: &ctx }, &domain, &inner);
            Enrichment {
                feasible: ctx.feasibility(&r.x),
                alpha: r.value,
                objective: r.value,
                gamma: 1.0,
                x: r.x,
            }
        } else {
            solve_enrichment(&ctx, kind, &domain, &inner)
        };
        let x = dedupe_or_perturb(
            &choice.x,
            &self.ds,
            &domain,
            derive_seed(self.seed, &[TAG_DEDUPE, iteration as u64]),
        );
        let e = self
            .problem
            .evaluate(&x)
            .map_err(|source| DriverError::Evaluator { iteration, source })?;
        let ok = e.is_feasible(self.config.eq_tolerance);
        self.ds.push(&x, &e.f, &e.g, &e.h)?;
        self.feasible.push(ok);
        let igd = self.score();
        self.record.igd_trace.push(igd);
        self.record.rows.push(IterationRow {
            iteration,
            sample: Sample {
                x,
                f: e.f,
                g: e.g,
                h: e.h,
                feasible: ok,
            },
            alpha: choice.alpha,
            gamma: choice.gamma,
            model_feasible: choice.feasible,
            bootstrap,
            archive_size: archive.len(),
            wall_time_s: start.elapsed().as_secs_f64(),
        });
        Ok(())
    }

    fn final_front(&mut self, iterations: usize) -> Result<(), DriverError> {
        let bundle = self.fit(iterations as u64 + 1).map_err(|source| DriverError::Surrogate {
            iteration: iterations + 1,
            source,
        })?;
        let surrogate = SurrogateMeanProblem::new(&bundle, self.ds.domain().clone());
        let cfg = Nsga2Config {
            seed: derive_seed(self.seed, &[TAG_FRONT]),
            eq_tolerance: self.config.eq_tolerance,
            ..self.config.final_front.clone()
        };
        let res = run_nsga2(&surrogate, &cfg)?;
        if res.feasible {
            self.record.final_front = res.archive.members().to_vec();
            self.record.final_designs = res.archive.designs().to_vec();
            if let Some(z) = &self.reference {
                self.record.front_igd = igd_plus(res.archive.members(), z.points()).ok();
            }
        }
        Ok(())
    }
}

/// One optimization run. Errors after the initial design end the run early
/// with `incomplete` set rather than failing.
pub fn run_bo(problem: &dyn Problem, config: &RunConfig, seed: u64) -> Result<RunRecord, DriverError> {
    let dims = problem.dims();
    config.validate(dims)?;
    let budget = config.budget_for(dims);
    let doe = config.doe_for(dims);
    let domain = problem.domain().clone();
    let mut lp = Loop {
        problem,
        config,
        seed,
        reference: reference_for(problem, config.reference_size),
        ds: Dataset::new(domain.clone(), dims.n, dims.p, dims.m),
        feasible: Vec::new(),
        record: RunRecord {
            problem: problem.name().to_string(),
            acquisition: config.acquisition.to_string(),
            seed,
            total_budget: budget,
            doe_size: doe,
            initial: Vec::new(),
            rows: Vec::new(),
            igd_trace: Vec::new(),
            final_front: Vec::new(),
            final_designs: Vec::new(),
            front_igd: None,
            incomplete: None,
        },
    };
    for x in lhs_sample(&domain, doe, derive_seed(seed, &[TAG_DOE]))? {
        let e = problem
            .evaluate(&x)
            .map_err(|source| DriverError::Evaluator { iteration: 0, source })?;
        let ok = e.is_feasible(config.eq_tolerance);
        lp.ds.push(&x, &e.f, &e.g, &e.h)?;
        lp.feasible.push(ok);
        lp.record.initial.push(Sample {
            x,
            f: e.f,
            g: e.g,
            h: e.h,
            feasible: ok,
        });
    }
    let iterations = budget - doe;
    for it in 1..=iterations {
        if let Err(e) = lp.step(it) {
            lp.record.incomplete = Some(e.to_string());
            return Ok(lp.record);
        }
    }
    if let Err(e) = lp.final_front(iterations) {
        lp.record.incomplete = Some(e.to_string());
    }
    Ok(lp.record)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub problem: String,
    pub acquisition: String,
    pub seeds: Vec<u64>,
    /// Pointwise mean of the IGD+ traces over runs that have a value.
    pub trace_mean: Vec<Option<f64>>,
    /// Pointwise sample standard deviation (0 with a single value).
    pub trace_std: Vec<Option<f64>>,
    /// Final-front IGD+ per completed run, with mean and sample std.
    pub front_scores: Vec<Option<f64>>,
    pub front_mean: Option<f64>,
    pub front_std: Option<f64>,
    /// Trace end per completed run, with mean and sample std.
    pub trace_end_scores: Vec<Option<f64>>,
    pub trace_end_mean: Option<f64>,
    pub trace_end_std: Option<f64>,
    /// `(seed, reason)` for runs that failed or stopped early.
    pub failures: Vec<(u64, String)>,
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    let s = if values.len() > 1 {
        (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (Some(m), Some(s))
}

impl ExperimentSummary {
    /// Aggregates completed records; incomplete ones are listed as failures.
    pub fn from_records(config: &RunConfig, records: &[RunRecord], mut failures: Vec<(u64, String)>) -> Self {
        let complete: Vec<&RunRecord> = records
            .iter()
            .filter(|r| match &r.incomplete {
                Some(why) => {
                    failures.push((r.seed, why.clone()));
                    false
                }
                None => true,
            })
            .collect();
        failures.sort_by_key(|f| f.0);
        let len = complete.iter().map(|r| r.igd_trace.len()).max().unwrap_or(0);
        let (trace_mean, trace_std) = (0..len)
            .map(|i| {
                let vals: Vec<f64> = complete.iter().filter_map(|r| r.igd_trace.get(i).copied().flatten()).collect();
                mean_std(&vals)
            })
            .unzip();
        let front_scores: Vec<Option<f64>> = complete.iter().map(|r| r.front_igd).collect();
        let (front_mean, front_std) = mean_std(&front_scores.iter().flatten().copied().collect::<Vec<_>>());
        let trace_end_scores: Vec<Option<f64>> = complete.iter().map(|r| r.trace_end()).collect();
        let (trace_end_mean, trace_end_std) =
            mean_std(&trace_end_scores.iter().flatten().copied().collect::<Vec<_>>());
        Self {
            problem: records.first().map(|r| r.problem.clone()).unwrap_or_default(),
            acquisition: config.acquisition.to_string(),
            seeds: config.seeds(),
            trace_mean,
            trace_std,
            front_scores,
            front_mean,
            front_std,
            trace_end_scores,
            trace_end_mean,
            trace_end_std,
            failures,
        }
    }
}

/// Runs every repetition (in parallel, each with its own problem instance)
/// and aggregates the IGD+ traces.
pub fn run_experiment(config: &RunConfig) -> Result<(ExperimentSummary, Vec<RunRecord>), DriverError> {
    let outcomes: Vec<(u64, Result<RunRecord, DriverError>)> = config
        .seeds()
        .into_par_iter()
        .map(|seed| {
            let res = config.problem.instantiate().and_then(|p| run_bo(p.as_ref(), config, seed));
            (seed, res)
        })
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (seed, res) in outcomes {
        match res {
            Ok(r) => records.push(r),
            Err(e @ DriverError::Config(_)) => return Err(e),
            Err(e) => failures.push((seed, e.to_string())),
        }
    }
    let summary = ExperimentSummary::from_records(config, &records, failures);
    Ok((summary, records))
}

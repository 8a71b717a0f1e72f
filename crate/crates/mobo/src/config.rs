use std::time::Duration;

use mobo_core::acquisition::AcquisitionKind;
use mobo_core::doe::{initial_doe_size, BoxDomain};
use mobo_core::inner_opt::InnerConfig;
use mobo_core::nsga2::Nsga2Config;
use mobo_core::problems::{Benchmark, Problem, ProblemDims};
use mobo_core::surrogate::GpConfig;
use serde::{Deserialize, Serialize};

use crate::error::DriverError;
use crate::external::ExternalProblem;

/// Where evaluations come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProblemSpec {
    Benchmark {
        name: String,
        /// Dimension for the ZDT family; ignored by fixed-size problems.
        dim: usize,
    },
    External {
        command: String,
        /// Box bounds; the unit hypercube when absent.
        bounds: Option<BoxDomain>,
        timeout_ms: u64,
    },
}

impl ProblemSpec {
    pub fn benchmark(name: &str, dim: usize) -> Self {
        ProblemSpec::Benchmark { name: name.into(), dim }
    }

    /// Instantiates the problem; external specs spawn a fresh process.
    pub fn instantiate(&self) -> Result<Box<dyn Problem + Send>, DriverError> {
        match self {
            ProblemSpec::Benchmark { name, dim } => Ok(Box::new(Benchmark::from_name(name, *dim)?)),
            ProblemSpec::External {
                command,
                bounds,
                timeout_ms,
            } => Ok(Box::new(
                ExternalProblem::spawn(command, bounds.clone(), Duration::from_millis(*timeout_ms)).map_err(
                    |e| DriverError::Evaluator {
                        iteration: 0,
                        source: e,
                    },
                )?,
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub acquisition: AcquisitionKind,
    /// Total evaluations per run; `20 d` when absent.
    pub total_budget: Option<usize>,
    /// Initial design size; `2d + 2c + 1` when absent.
    pub doe_size: Option<usize>,
    pub repetitions: usize,
    /// Repetition `r` uses seed `seed + r`.
    pub seed: u64,
    pub gp: GpConfig,
    pub inner: InnerConfig,
    pub final_front: Nsga2Config,
    /// Size of the analytic reference front used for IGD+.
    pub reference_size: usize,
    /// `|h| <= eq_tolerance` on true equality constraints.
    pub eq_tolerance: f64,
    /// Feasibility margin on inequality surrogates.
    pub kappa: f64,
}

impl RunConfig {
    pub fn new(problem: ProblemSpec, acquisition: AcquisitionKind) -> Self {
        Self {
            problem,
            acquisition,
            total_budget: None,
            doe_size: None,
            repetitions: 10,
            seed: 0,
            gp: GpConfig::default(),
            inner: InnerConfig::default(),
            final_front: Nsga2Config::default(),
            reference_size: 1000,
            eq_tolerance: 1e-4,
            kappa: 0.0,
        }
    }

    pub fn budget_for(&self, dims: ProblemDims) -> usize {
        self.total_budget.unwrap_or(20 * dims.d)
    }

    pub fn doe_for(&self, dims: ProblemDims) -> usize {
        self.doe_size.unwrap_or_else(|| initial_doe_size(dims.d, dims.n_constraints()))
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.repetitions as u64).map(|r| self.seed.wrapping_add(r)).collect()
    }

    pub fn validate(&self, dims: ProblemDims) -> Result<(), DriverError> {
        let (budget, doe) = (self.budget_for(dims), self.doe_for(dims));
        if doe == 0 {
            return Err(DriverError::Config("initial design must not be empty".into()));
        }
        if budget <= doe {
            return Err(DriverError::Config(format!(
                "total budget {budget} must exceed the initial design size {doe}"
            )));
        }
        if self.repetitions == 0 {
            return Err(DriverError::Config("at least one repetition is required".into()));
        }
        if dims.n != 2 {
            return Err(DriverError::Config(format!(
                "infill criteria need two objectives, problem has {}",
                dims.n
            )));
        }
        Ok(())
    }
}

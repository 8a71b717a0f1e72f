//! Std companion to `mobo-core`: the optimization driver, the experiment
//! protocol, an external evaluator client, file formats and the CLI.

pub mod config;
pub mod driver;
pub mod error;
pub mod export;
pub mod external;

pub use config::{ProblemSpec, RunConfig};
pub use driver::{run_bo, run_experiment, ExperimentSummary, IterationRow, RunRecord, Sample};
pub use error::DriverError;
pub use external::ExternalProblem;
pub use mobo_core;

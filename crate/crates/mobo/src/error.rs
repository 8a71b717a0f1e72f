use mobo_core::acquisition::AcquisitionError;
use mobo_core::nsga2::Nsga2Error;
use mobo_core::pareto::ParetoError;
use mobo_core::problems::{EvaluatorError, ProblemError};
use mobo_core::surrogate::GpError;
use mobo_core::doe::DoeError;

#[derive(Debug, thiserror::Error)]
pub enum DriverError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Doe(#[from] DoeError),
    #[error("surrogate fit failed at iteration {iteration}: {source}")]
    Surrogate { iteration: usize, source: GpError },
    #[error("evaluation failed at iteration {iteration}: {source}")]
    Evaluator { iteration: usize, source: EvaluatorError },
    #[error("acquisition setup failed at iteration {iteration}: {source}")]
    Acquisition { iteration: usize, source: AcquisitionError },
    #[error(transparent)]
    Pareto(#[from] ParetoError),
    #[error(transparent)]
    Nsga2(#[from] Nsga2Error),
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("CSV error on {path}: {message}")]
    Csv { path: String, message: String },
    #[error("JSON error on {path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

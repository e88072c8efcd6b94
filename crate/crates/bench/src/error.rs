use thiserror::Error;

/// Failures of the experiment harness.
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Solver(#[from] aogd::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("every realization failed: {0}")]
    AllFailed(String),
}

impl BenchError {
    /// Process exit code: 1 for input and I/O problems, 2 for numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::AllFailed(_) => 2,
            BenchError::Solver(aogd::Error::NonFinite { .. } | aogd::Error::NoConvergence { .. }) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;

use std::path::PathBuf;

use graphnash::SolverError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable input or a bad argument value.
    #[error("{0}")]
    Parse(String),

    /// Input that parses but breaks an invariant.
    #[error("{0}")]
    Invalid(String),

    /// A solver precondition failed.
    #[error("{0}")]
    Engine(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Invalid(_) => 3,
            CliError::Engine(_) => 4,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Validation(_) | SolverError::InvalidProfile(_) | SolverError::ArityMismatch { .. } => {
                CliError::Invalid(e.to_string())
            }
            other => CliError::Engine(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

use std::io;

use thiserror::Error;

/// Failures of a CLI command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("resources: {0}")]
    Resource(String),
    #[error(transparent)]
    Core(bqr_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::Io(_) => 3,
            CliError::Resource(_) => 4,
        }
    }
}

impl From<bqr_core::Error> for CliError {
    fn from(e: bqr_core::Error) -> Self {
        match e {
            bqr_core::Error::BudgetTooSmall { .. } => CliError::Resource(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::Io(io),
            other => CliError::Io(io::Error::other(format!("{other:?}"))),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<rayon::ThreadPoolBuildError> for CliError {
    fn from(e: rayon::ThreadPoolBuildError) -> Self {
        CliError::Usage(format!("thread pool: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

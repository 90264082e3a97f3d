use thiserror::Error;

use splitpack_core::Error as CoreError;

/// A failed command, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Verify(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Verify(_) => 5,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::Parse(_) | CoreError::InvalidInstance(_) => CliError::Parse(msg),
            CoreError::UnsupportedK { .. } | CoreError::Precondition(_) => CliError::Usage(msg),
            CoreError::BudgetExceeded(_) => CliError::Budget(msg),
            CoreError::InvalidPacking(_) | CoreError::TraceMismatch(_) => CliError::Verify(msg),
        }
    }
}

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("operation requires k = {expected}, instance has k = {got}")]
    UnsupportedK { expected: usize, got: usize },
    #[error("invalid packing: {0}")]
    InvalidPacking(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("trace does not match instance: {0}")]
    TraceMismatch(String),
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not a cycle: boundary is nonzero")]
    NotACycle,
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("search exhausted: {0}")]
    Exhausted(String),
    #[error("unstable under refinement: {0}")]
    Unstable(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

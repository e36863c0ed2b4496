use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("linear program failed: {0}")]
    Solver(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

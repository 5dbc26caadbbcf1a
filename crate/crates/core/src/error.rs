use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PuError {
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("instance too large for the dual solver: {n} points (cap {cap})")]
    InstanceTooLarge { n: usize, cap: usize },
    #[error("infeasible constraint set: {0}")]
    Infeasible(String),
    #[error("degenerate test: {0}")]
    DegenerateTest(String),
    #[error("calibration failure: {0}")]
    Calibration(String),
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, PuError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> PuError {
    PuError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

use puoc::PuError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] PuError),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{path}: {reason}")]
    Format { path: String, reason: String },
    #[error("cannot pair records: {0}")]
    Pairing(String),
}

pub type Result<T> = std::result::Result<T, BenchError>;

pub(crate) fn config_err(msg: impl Into<String>) -> BenchError {
    BenchError::Config(msg.into())
}

use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("configuration {0} is not part of the basis")]
    UnknownConfig(String),

    #[error("ordinal {ordinal} out of range for basis of dimension {dim}")]
    OrdinalOutOfRange { ordinal: usize, dim: usize },

    #[error("basis mismatch: expected {expected}, got {got}")]
    BasisMismatch { expected: String, got: String },

    #[error("invalid coupling profile: {0}")]
    InvalidProfile(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("time {t} outside schedule range [0, {total}]")]
    TimeOutOfRange { t: f64, total: f64 },

    #[error("propagator failed to converge: {0}")]
    NonConvergence(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("singular parameters: {0}")]
    Singular(String),

    #[error("config error at line {line}: {message}")]
    ConfigLine { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

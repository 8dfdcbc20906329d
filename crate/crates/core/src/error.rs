use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("angular index out of range: j = {j}, m = {m}")]
    IndexOutOfRange { j: i64, m: i64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized: {0}")]
    NotNormalized(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(
        "objective decreased at iteration {iteration}: {previous} -> {current} (tensor or M assembly is inconsistent)"
    )]
    NonMonotone {
        iteration: usize,
        previous: f64,
        current: f64,
    },

    #[error("insufficient data: need at least {needed} rows, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("serialization: {0}")]
    Serialization(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

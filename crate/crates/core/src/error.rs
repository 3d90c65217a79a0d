use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("percentile q = {0} is outside (0, 100]")]
    InvalidPercentile(f64),

    #[error("user count must be at least 1")]
    EmptyNetwork,

    #[error("percentile number {kq} is outside 1..={len}")]
    PercentileNumberOutOfRange { kq: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("infeasible power vector: {0}")]
    Infeasible(String),

    #[error("argument {0} is outside the domain of the logarithm")]
    Domain(f64),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("problem too large for enumeration: {size} > {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is missing or invalid; `key` names it.
    #[error("invalid configuration at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("{what} needs {size} entries, limit is {limit}")]
    SizeGuard {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("operator is not Hermitian: max |A - A†| = {0:e}")]
    NotHermitian(f64),

    #[error("probe field has zero norm")]
    DegenerateProbe,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("non-positive value {value} at index {index}")]
    NonPositive { index: usize, value: f64 },

    #[error("zero value at index {index} (division by zero)")]
    ZeroDivision { index: usize },

    #[error("series `{0}` has zero variance")]
    ZeroVariance(String),

    #[error("series `{name}`: {message}")]
    Calendar { name: String, message: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("filter underflow at time index {0}")]
    Underflow(usize),

    #[error("non-finite likelihood at iteration {iteration}")]
    Diverged { iteration: usize },

    #[error("instance too large for enumeration: {0} paths")]
    TooLarge(f64),

    #[error("posterior precision is not positive definite")]
    Singular,

    #[error("no out-of-sample row for forecast horizon {0}")]
    MissingHorizon(usize),

    #[error("dataset fingerprint mismatch: draws were fitted on {expected}, dataset is {actual}")]
    Fingerprint { expected: String, actual: String },
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

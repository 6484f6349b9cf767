use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("grids differ at index {index}: {left} vs {right}")]
    GridMismatch { index: usize, left: f64, right: f64 },

    #[error("horizons differ: {left} vs {right}")]
    HorizonMismatch { left: f64, right: f64 },

    #[error("threshold condition violated: {0}")]
    InvalidThreshold(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("degenerate statistic: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by malformed input files (as opposed to
    /// well-formed input that fails validation).
    pub fn is_parse_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Csv(_))
    }
}

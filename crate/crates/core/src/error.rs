use crate::series::Units;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed or insufficient input (lengths, coverage, windows, arguments).
    #[error("input error: {0}")]
    Input(String),

    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unit mismatch: {left} vs {right}")]
    UnitMismatch { left: Units, right: Units },

    /// Degenerate or rank-deficient design.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// Row-level parse failure in a series source; `row` is 1-based and counts the header.
    #[error("row {row}: {message}")]
    Parse { row: u64, message: String },

    #[error("retrieval error: {0}")]
    Retrieval(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn estimation(msg: impl Into<String>) -> Self {
        Error::Estimation(msg.into())
    }
}

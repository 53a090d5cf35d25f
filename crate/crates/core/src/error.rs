use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke a documented precondition (width mismatch, index out of range, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Malformed or unusable input data.
    #[error("data error: {0}")]
    Data(String),

    /// Expression syntax error at a byte offset of the source text.
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    /// The model produced a non-finite value.
    #[error("model domain error: {0}")]
    Domain(String),

    /// The requested exact computation exceeds the enumeration limit.
    #[error("{0}")]
    Limit(String),

    /// An internal invariant was violated.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}

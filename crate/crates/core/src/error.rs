use thiserror::Error;

/// Errors raised by the counting engine.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The caller broke a precondition (mismatched caps, undersized table, ...).
    #[error("contract violation: {0}")]
    Contract(String),
    /// A quantity that must be an integer came out fractional or negative.
    /// This always signals a transcription bug in a recurrence.
    #[error("non-integral value at {context}")]
    NonIntegral { context: String },
    /// The request exceeds a brute-force resource guard.
    #[error("refused: {what} is limited to n <= {limit} (requested {requested})")]
    ResourceGuard {
        what: &'static str,
        limit: usize,
        requested: usize,
    },
    /// A truncated sum did not capture enough probability mass.
    #[error("truncation too small: residual mass {residual:e} exceeds {tolerance:e}")]
    Tolerance { residual: f64, tolerance: f64 },
    /// Malformed external input (cache files, CSV/JSON distributions, lists).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

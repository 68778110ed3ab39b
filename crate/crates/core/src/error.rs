use thiserror::Error;

/// Errors raised by the lab. Variants are grouped by class so a front end can
/// map them onto stable exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("window mismatch: expected {expected}, found {found}")]
    WindowMismatch { expected: String, found: String },

    #[error("parse error: {0}")]
    Parse(String),

    /// A computation refused to produce an answer because a numerical
    /// hypothesis (invertibility, idempotence, margin) failed.
    #[error("numerical refusal: {0}")]
    NumericalRefusal(String),

    #[error("step budget of {budget} exceeded while reducing `{word}`")]
    BudgetExceeded { budget: usize, word: String },

    /// Two independent decision procedures disagreed.
    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn refusal(msg: impl Into<String>) -> Self {
        Error::NumericalRefusal(msg.into())
    }
}

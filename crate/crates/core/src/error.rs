use thiserror::Error;

#[derive(Debug, Error)]
pub enum GcgError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The computed gap fell below zero by more than the floating-point slack.
    /// Only a broken linear minimization oracle can produce this.
    #[error("broken oracle: gap {gap:e} is negative beyond slack {slack:e}")]
    NegativeGap { gap: f64, slack: f64 },

    #[error("line search failed after {backtracks} backtracks (gap {gap:e})")]
    LineSearchFailed { backtracks: u32, gap: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GcgError>;

pub(crate) fn ensure_finite(what: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(GcgError::InvalidInput(format!("{what} is not finite ({x})")))
    }
}

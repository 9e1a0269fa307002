use thiserror::Error;

/// Errors produced by the estimators, the generator and the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its valid range or inconsistent with the input.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Too few samples or profile points for the requested operation.
    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// A value outside the mathematical domain (non-finite sample, non-positive length).
    #[error("domain error: {0}")]
    Domain(String),

    /// The curve length vanished at scale `k` (constant or piecewise-constant input).
    #[error("degenerate series: zero curve length at k = {k}")]
    Degenerate { k: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

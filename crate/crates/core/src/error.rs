use thiserror::Error;

/// Errors shared by all modules. Guard violations carry the name of the
/// guard so callers (and the CLI) can surface it verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("guard `{0}` exceeded: {1}")]
    Guard(&'static str, String),
    #[error("multi-index infeasible: sum of entries {total} exceeds {limit}")]
    InfeasibleIndex { total: u64, limit: u64 },
    #[error("alpha must lie in (0,1), got {0}")]
    AlphaRange(f64),
    #[error("index out of range: {0}")]
    IndexRange(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

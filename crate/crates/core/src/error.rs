use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis is not full rank (rank {rank} < ambient {ambient})")]
    NotFullRank { rank: usize, ambient: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no nontrivial character remains in the support")]
    EmptySupport,

    #[error("operation is only defined for cyclic groups")]
    NonCyclicGroup,

    #[error("bad range: {0}")]
    BadRange(String),

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("degree search passed the group-order cap at degree {degree}; this is a bug")]
    Diverged { degree: u64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

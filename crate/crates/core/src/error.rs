use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("m = {m} exceeds the memory cap (max m = {max_m}, 2^(2m) bits)")]
    ResourceLimit { m: u32, max_m: u32 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "no matrix with the block property after {attempts} attempts \
         (union bound on failure probability: 2^{block_bound_log2:.3})"
    )]
    Exhausted { attempts: u32, block_bound_log2: f64 },

    #[error("malformed input at byte {offset}: {reason}")]
    Malformed { offset: usize, reason: String },

    #[error("closed-form hypotheses violated: {}", .0.join(", "))]
    Hypothesis(Vec<&'static str>),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

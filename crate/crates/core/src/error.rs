use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid assignment: sub-band {band} is assigned to users {first} and {second}")]
    InvalidAssignment {
        band: usize,
        first: usize,
        second: usize,
    },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("infeasible allocation: {0}")]
    InfeasibleAllocation(String),

    #[error("bit count {bits} exceeds the supported maximum {max}")]
    BudgetTooLarge { bits: u32, max: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate problem: {0}")]
    Degenerate(String),

    #[error("instance too large for exhaustive search: {count} allocations (limit {limit})")]
    InstanceTooLarge { count: u128, limit: u128 },

    #[error("empty codebook")]
    EmptyCodebook,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("instance exceeds size cap: {0}")]
    SizeCap(String),

    #[error("undefined statistics: estimated makespan is zero")]
    UndefinedStats,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed solution: {0}")]
    MalformedSolution(String),

    #[error("bound violation: solution {solution} is below lower bound {bound}")]
    BoundViolation { solution: i64, bound: i64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

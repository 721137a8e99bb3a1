use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("wrong valuation class: expected {expected}, got {got}")]
    WrongValuationClass { expected: String, got: String },
    #[error("instance too large to enumerate: {profiles} profiles exceeds cap {cap}")]
    TooLarge { profiles: u128, cap: u128 },
    #[error("prior must be discrete for this operation")]
    NotDiscrete,
    #[error("regularity check could not evaluate the revenue curve at q = {0}")]
    NotEvaluable(f64),
    #[error("lp failed: {0}")]
    Lp(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

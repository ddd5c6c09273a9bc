use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series has no coefficients")]
    EmptySeries,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{what}: order {requested} requested but only {supported} is supported")]
    UnsupportedOrder { what: &'static str, requested: usize, supported: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("sequence too short: need {needed} terms, have {have}")]
    InsufficientData { needed: usize, have: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

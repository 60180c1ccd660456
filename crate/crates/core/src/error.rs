use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("nonpositive value {value} at time index {index}, column {column}")]
    NonPositive {
        index: usize,
        column: usize,
        value: f64,
    },

    #[error("no holdings: panel carries no quantities")]
    MissingHoldings,

    #[error("singular trade-unit map at time index {index} (condition estimate {condition:e})")]
    Singular { index: usize, condition: f64 },

    #[error("zero divisor at time index {0}")]
    ZeroDivisor(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("infeasible constraints: {0}")]
    Infeasible(String),

    #[error("degenerate problem: {0}")]
    Degenerate(String),

    #[error("series does not cover [0, {horizon}]: {detail}")]
    Coverage { horizon: f64, detail: String },

    #[error("{path}: row {row}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: usize,
        message: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

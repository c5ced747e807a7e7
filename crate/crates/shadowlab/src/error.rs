use thiserror::Error;

use crate::space::Point;

/// Crate-wide error type.
///
/// Numerical routines distinguish bad inputs (wrong dimension, NaN, invalid
/// parameters) from blown resource budgets, from certification failures where
/// a claimed bound is contradicted by a concrete witness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error(
        "certified bound violated at step {step}: distance {distance:.3e} exceeds bound {bound:.3e} at {point:?}"
    )]
    CertificationFailed {
        step: i64,
        point: Point,
        distance: f64,
        bound: f64,
    },

    #[error("iteration failed to converge ({context}): residual {residual:.3e}")]
    Convergence { residual: f64, context: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

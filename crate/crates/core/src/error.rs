//! Error type shared across the pipeline.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A column or schema-shape problem (missing column, width mismatch,
    /// fingerprint mismatch, duplicate names).
    #[error("schema error: {0}")]
    Schema(String),

    /// A cell could not be parsed as the declared kind.
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    /// A value outside the declared domain (unknown categorical level,
    /// non-binary indicator, non-finite number).
    #[error("value error: {0}")]
    Value(String),

    /// A caller-supplied parameter outside its documented range.
    #[error("argument error: {0}")]
    Argument(String),

    /// An operation that needs both classes saw only one (or too few rows
    /// of one class).
    #[error("degenerate class: {0}")]
    DegenerateClass(String),

    /// The optimizer ran out of iterations before reaching tolerance.
    #[error("did not converge: gradient norm {grad_norm:e} after {iterations} iterations")]
    Convergence { grad_norm: f64, iterations: usize },

    /// A metric whose denominator is empty (e.g. recall with no positives).
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide error type.
///
/// Variants are grouped by the pipeline stage they belong to so callers
/// (notably the CLI) can map them onto exit codes without string matching.
#[derive(Debug, Error)]
pub enum Error {
    /// A value was outside the mathematical domain of an operation.
    #[error("series {ticker}: non-positive value {value} at index {index} (log transform requires positive prices)")]
    NonPositiveValue {
        ticker: String,
        index: usize,
        value: f64,
    },

    /// An input file did not match the documented schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A file matched the schema but carried invalid data.
    #[error("data error in {path} (row {row}): {message}")]
    Data {
        path: String,
        row: usize,
        message: String,
    },

    /// The corpus as a whole is unusable.
    #[error("corpus error: {0}")]
    Corpus(String),

    /// Inconsistent or impossible configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller passed an argument outside its documented range.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Tensor dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Training failed (divergence, non-finite gradients).
    #[error("training error: {0}")]
    Training(String),

    /// A bootstrap replication aborted; the whole test is invalid.
    #[error("bootstrap replication {index} failed: {message}")]
    Bootstrap { index: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

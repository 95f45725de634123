//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by dataset handling, model fitting, and report generation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv parse error: {0}")]
    Csv(#[from] csv::Error),

    #[error("response column '{0}' not found in header")]
    MissingColumn(String),

    #[error("non-numeric feature value '{value}' at row {row}, column '{column}'")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("non-binary response '{value}' at row {row}, column '{column}'")]
    NonBinaryResponse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("non-finite feature value at row {row}, column '{column}'")]
    NonFiniteCell { row: usize, column: String },

    #[error("dataset is degenerate: {0}")]
    InvalidDataset(String),

    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("train/test fraction {0} yields an empty partition")]
    DegenerateSplit(f64),

    #[error("invalid feature weights: {0}")]
    InvalidWeights(String),

    #[error("dataset contains a single response class; cannot fit")]
    SingleClass,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no out-of-bag rows available (was per-tree bootstrap enabled?)")]
    NoOobRows,

    #[error("no class-{0} leaves with routed observations")]
    NoClassLeaves(u8),

    #[error("signed interaction is invalid: {0}")]
    InvalidInteraction(String),

    #[error("failed to parse interaction '{text}': {reason}")]
    InteractionParse { text: String, reason: String },

    #[error("interaction absent from forest")]
    InteractionAbsent,

    #[error("bootstrap replicate {0} failed: {1}")]
    ReplicateFailed(usize, Box<Error>),

    #[error("precision-recall input is invalid: {0}")]
    InvalidRanking(String),

    #[error("unsupported bundle schema version {0}")]
    SchemaVersion(u32),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

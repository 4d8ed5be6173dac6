use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text (FIMI files, model files).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A value outside its documented domain (thresholds, sizes, counts).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An invalid ground-truth model (bad probability vector, duplicate support).
    #[error("invalid model: {0}")]
    Model(String),

    /// A structural precondition violated (e.g. a family that is not downward closed).
    #[error("structural error: {0}")]
    Structure(String),

    /// The requested computation cannot proceed (e.g. the mining band would
    /// require a non-positive threshold).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A configured resource cap was hit; results would be incomplete.
    #[error("resource cap hit: {0}")]
    ResourceCap(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error type shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed CSV content. Row and column are 1-based.
    #[error("parse error at row {row}, column {col}: {reason}")]
    Parse { row: usize, col: usize, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// One dimensional transport here is defined only between supports of
    /// equal size.
    #[error("supports have different sizes: {left} vs {right}")]
    UnequalSupport { left: usize, right: usize },

    /// The monomial basis would be too large to enumerate.
    #[error("feature count {count} exceeds cap {cap}")]
    CapExceeded { count: u64, cap: u64 },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    /// The fast path for stacked linear maps requires at least one layer;
    /// zero layers is plain sliced distance and has its own estimator.
    #[error("layer count must be at least 1 for the fast path")]
    LayerCount,

    #[error("degenerate rate fit: {0}")]
    DegenerateFit(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),
}

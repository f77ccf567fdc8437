use thiserror::Error;

/// Errors raised while constructing parameters or running the higher-level
/// routines. The scalar kernels themselves are total and never fail.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape parameter alpha must be finite and > 0, got {0}")]
    InvalidAlpha(f64),

    #[error("scale must be finite and > 0, got {0}")]
    InvalidScale(f64),

    #[error("shift offsets must be finite, got ({dx}, {dy})")]
    InvalidShift { dx: f64, dy: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("finite-difference stencil is non-finite at x = {x} (h = {h})")]
    NonFiniteStencil { x: f64, h: f64 },

    #[error("malformed curve CSV: {0}")]
    MalformedCsv(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A spin handed to a decomposition missed the declared length by more
    /// than 1e-9 relative (ordinary floating-point drift sits at 1e-12).
    #[error("spin norm precondition violated at spin {site}: |S| = {norm}, expected {expected}")]
    NormPrecondition { site: usize, norm: f64, expected: f64 },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

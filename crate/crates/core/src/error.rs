use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("did not converge: {0}")]
    Convergence(String),

    #[error("bump factor {p} leaves the representable range (|ln a_p| > 700); reduce N")]
    BumpUnderflow { p: u32 },

    #[error("sampling too coarse for requested frequencies: spacing {got:e} exceeds {required:e} (Nyquist must exceed 4x the largest |xi|)")]
    Resolution { required: f64, got: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

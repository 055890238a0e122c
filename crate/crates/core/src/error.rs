use thiserror::Error;

/// Errors produced by the linear algebra, channel and correlation layers.
#[derive(Debug, Error)]
pub enum QError {
    #[error("dimension overflow: product dimension {0} exceeds 16")]
    DimensionOverflow(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid subsystem subset: keep must be a nonempty proper subset")]
    InvalidSubset,

    #[error("matrix is not Hermitian: max |m - m†| = {0:.3e}")]
    NotHermitian(f64),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("state vector is not normalized: |norm - 1| = {0:.3e}")]
    NotNormalized(f64),

    #[error("Kraus set violates completeness: max |ΣK†K - I| = {0:.3e}")]
    NotComplete(f64),

    #[error("unsupported dilation: {0} Kraus operators exceed environment dimension 4")]
    UnsupportedDilation(usize),

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("unsupported functional `{0}`")]
    UnsupportedFunctional(String),

    #[error("inconsistent state: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, QError>;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{0} contains non-finite entries")]
    NonFinite(&'static str),

    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid factor shape: {0}")]
    InvalidShape(String),

    #[error("index {index} out of range for {context} (limit {limit})")]
    OutOfRange {
        context: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("particle count {0} outside supported range 1..=6")]
    ParticleCount(usize),

    #[error("state vanishes after (anti)symmetrization (norm {norm:.3e})")]
    ZeroVector { norm: f64 },

    #[error("regions share modes {0:?}")]
    RegionConflict(Vec<usize>),

    #[error("empty region")]
    EmptyRegion,

    #[error("region needs {needed} modes but has {available}")]
    InsufficientModes { needed: usize, available: usize },

    #[error("operator is not an orthogonal projection (defect {defect:.3e})")]
    NotAProjection { defect: f64 },

    #[error("wavefunction is not supported in its declared region (leak {leak:.3e})")]
    SupportViolation { leak: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

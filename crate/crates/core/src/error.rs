use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("matrix is not symmetric: max |M_ij - M_ji| = {deviation:e} exceeds {tolerance:e}")]
    AsymmetricInput { deviation: f64, tolerance: f64 },
    #[error("dimension {dim} exceeds cap {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("zero vector has no Rayleigh quotient")]
    DegenerateVector,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("argument outside domain: {0}")]
    DomainError(String),
    #[error("lambda = {lambda} lies within {distance:e} of a pole")]
    NearPole { lambda: f64, distance: f64 },
    #[error("no decomposition: {0}")]
    NoDecomposition(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("invalid clock: {0}")]
    InvalidClock(String),
    #[error("clock contract violated: {0}")]
    ClockContractViolation(String),
    #[error("register state is not correctly initialised: {0}")]
    NotInitialized(String),
    #[error("matrix is not a projector: {0}")]
    NotAProjector(String),
    #[error("decomposition failed: {0}")]
    DecompositionFailed(String),
    #[error("instance contract violated: {0}")]
    InstanceContractViolation(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by channel construction, simulation, and estimation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unsupported density-matrix dimension {0} (supported: 2, 8)")]
    UnsupportedDimension(usize),

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("fidelity is undefined for an all-zero matrix")]
    ZeroNorm,

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("parameter {name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid mixing weights: {0}")]
    InvalidWeights(String),

    #[error("degenerate parametrization: {0}")]
    DegenerateParametrization(String),

    #[error("vanishing denominator in decay-rate evaluation at t = {0}")]
    SingularDenominator(f64),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("trajectory holds no samples")]
    EmptyTrajectory,

    #[error("measurement record is missing observable {0}")]
    MissingObservable(String),

    #[error("p is not identifiable: weights give the |0> population no signal (x1 + x2 = 0)")]
    NonIdentifiable,

    #[error("fit failed: {0}")]
    FitFailure(String),
}

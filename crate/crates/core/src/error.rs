use thiserror::Error;

/// Errors raised by the bootstrap solver.
///
/// `SingularRecursion`, `SingularPoint` and `NonFinite` are per-point
/// conditions: a scan records them as skipped points instead of aborting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BootError {
    #[error("moment sequence has {available} entries, need {required}")]
    InsufficientDepth { required: usize, available: usize },

    #[error("matrix is not Hermitian (deviation {deviation:.3e} exceeds {bound:.3e})")]
    NotHermitian { deviation: f64, bound: f64 },

    #[error("matrix must be square with dimension >= 1, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },

    #[error("recursion leading coefficient vanishes at row t = {row}")]
    SingularRecursion { row: usize },

    #[error("closed-form matrix is singular at E = {energy}")]
    SingularPoint { energy: f64 },

    #[error("non-finite moment at index {index}")]
    NonFinite { index: usize },

    #[error("PT symmetry is broken: s^2 - r^2 sin^2(theta) = {discriminant}")]
    BrokenPt { discriminant: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("missing parameter `{0}`")]
    MissingParameter(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("grid dimensions {found:?} do not match model dimensions {expected:?}")]
    DimensionMismatch { expected: Vec<String>, found: Vec<String> },

    #[error("invalid grid axis `{name}`: {reason}")]
    InvalidGrid { name: String, reason: String },

    #[error("no feasible point in {bounds}")]
    NoFeasiblePoint { bounds: String },

    #[error("witness at E = {energy} is no longer feasible")]
    WitnessLost { energy: f64 },

    #[error("potential degree {0} exceeds the supported maximum of 8")]
    DegreeTooHigh(usize),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("expected {expected} seed moments, got {found}")]
    SeedCountMismatch { expected: usize, found: usize },

    #[error("finite-difference spectrum not converged: estimate {estimate:.3e} for state {state}")]
    NotConverged { state: usize, estimate: f64 },

    #[error("operation not supported for model `{0}`")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, BootError>;

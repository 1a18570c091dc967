use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QjdError {
    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("matrix is not Hermitian: ||A - A^H||_F = {residual:e} exceeds {bound:e}")]
    NotHermitian { residual: f64, bound: f64 },

    #[error("not a density state: {0}")]
    NotDensity(String),

    #[error("matrix is not unitary: ||U^H U - I||_F = {residual:e} exceeds {bound:e}")]
    NotUnitary { residual: f64, bound: f64 },

    #[error("degenerate random sample after {attempts} attempts")]
    DegenerateSample { attempts: u32 },

    #[error("eigensolver failed: {0}")]
    DecompositionFailure(String),

    #[error("spectral invariant violated: {0}")]
    InvariantViolation(String),

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("observables {first} and {second} do not commute: ||[A, B]||_F = {norm:e} exceeds {bound:e}")]
    NotCommuting {
        first: usize,
        second: usize,
        norm: f64,
        bound: f64,
    },

    #[error("weight {weight:e} at grid point {index} is negative beyond roundoff")]
    NonnegativityViolation { index: usize, weight: f64 },

    #[error("weights sum to {sum:.17e}, not 1")]
    NormalizationViolation { sum: f64 },

    #[error("construction takes exactly {expected} observables, got {got}")]
    WrongArity { expected: usize, got: usize },

    #[error("no observables given")]
    NoObservables,

    #[error("too many observables for the construction: {got} > {max}")]
    TooManyObservables { got: usize, max: usize },

    #[error("empty axis set")]
    EmptyAxisSet,

    #[error("outcome grids differ: {0}")]
    GridMismatch(String),

    #[error("operation requires probability distributions, got a quasi-distribution")]
    UnsupportedKind,

    #[error("combined support {size} exceeds the cap of {cap}")]
    TooLarge { size: usize, cap: usize },

    #[error("transport solver did not converge in {0} pivots")]
    TransportStalled(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("suite `{}` produced no valid trials", .0.suite)]
    NoValidTrials(Box<crate::verify::VerificationReport>),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for QjdError {
    fn from(e: serde_json::Error) -> Self {
        QjdError::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, QjdError>;

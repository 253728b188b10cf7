use thiserror::Error;

/// Errors raised by the width laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the kernel domain")]
    Domain { point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    #[error("expansion truncated: requested {requested} terms, {available} available")]
    Truncation { requested: usize, available: usize },

    #[error("insufficient resolution: requested {requested} eigenpairs from {available} nodes")]
    InsufficientResolution { requested: usize, available: usize },

    #[error("no analytic spectrum registered for kernel `{0}`")]
    NoAnalyticSpectrum(String),

    #[error("tail sum beyond index {n} needs a trace ({available} eigenvalues resolved)")]
    InsufficientTail { n: usize, available: usize },

    #[error("index {index} out of range ({available} available)")]
    IndexOutOfRange { index: usize, available: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid norm exponent p = {0}")]
    InvalidExponent(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("spectrum carries no eigenfunction values")]
    MissingEigenfunctions,

    #[error("requested rank {n} is not below the model rank {rank}")]
    RankExceeded { n: usize, rank: usize },

    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("insufficient points: need {needed}, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("series `{0}` lacks the dyadic pairs (n, 2n) needed for a regularity check")]
    MissingDyadicPairs(String),

    #[error("series grids do not match: {0}")]
    GridMismatch(String),

    #[error("non-positive entry at index {index}: {value}")]
    NonPositive { index: usize, value: f64 },

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("malformed file {path}: {message}")]
    Format { path: String, message: String },

    #[error("stage `{stage}`: {source}")]
    Stage { stage: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// The error without stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors surfaced by constructors and orbit machinery.
///
/// Numeric trouble is always reported, never silently wrapped or clamped.
#[derive(Debug, Error)]
pub enum DynError {
    #[error("unknown gallery id `{0}`")]
    UnknownGallery(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not invertible over the integers (det must be +/-1, got {0})")]
    NonInvertibleMatrix(i64),

    #[error("interval map spec is not strictly monotone: {0}")]
    NonMonotone(String),

    #[error("point does not lie in the ambient space: {0}")]
    PointNotInSpace(String),

    #[error("numeric overflow while iterating: {0}")]
    Overflow(String),

    #[error("sampling density {density} too small for {kind}")]
    DensityTooSmall { density: usize, kind: String },

    #[error("pseudo-orbit tolerance violated: d(T x_{index}, x_{next}) = {defect} > {tol}")]
    PseudoOrbit {
        index: i64,
        next: i64,
        defect: f64,
        tol: f64,
    },

    #[error("t-sequence is not strictly monotone at index {0}")]
    TSequenceNotMonotone(i64),

    #[error("observable `{0}` rejected: {1}")]
    BadObservable(String, String),

    #[error("table is missing a value for cloud point {0}")]
    TableIncomplete(usize),

    #[error("empty epsilon grid")]
    EmptyGrid,

    #[error("subshift error: {0}")]
    Subshift(String),

    #[error("generator depth exhausted: {0}")]
    DepthExhausted(String),

    #[error("alpha must be irrational (supplied as a continued-fraction term stream): {0}")]
    RationalAlpha(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, DynError>;

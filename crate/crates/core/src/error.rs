use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid multi-index: {0}")]
    InvalidIndex(String),

    #[error("1-form is not of pure (1,0) or (0,1) type")]
    MixedType,

    #[error("form is not homogeneous in degree")]
    Inhomogeneous,

    #[error("arity mismatch: form of grade {grade} evaluated on {given} vectors")]
    Arity { grade: usize, given: usize },

    #[error("grade mismatch: {0} vs {1}")]
    GradeMismatch(usize, usize),

    #[error("evaluation hit a pole: denominator factor vanishes at the point")]
    Pole,

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    #[error("matrix is not skew-symmetric (entry ({0}, {1}))")]
    NotSkew(usize, usize),

    #[error("skew matrix must have even size, got {0}")]
    OddDimension(usize),

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("level is not regular: {0}")]
    IrregularLevel(String),

    #[error("level-set sampling failed after {0} attempts")]
    SamplingFailed(usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

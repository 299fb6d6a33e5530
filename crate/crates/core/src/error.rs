use thiserror::Error;

/// Errors raised by the toric engine.
///
/// `Hypothesis` is distinct from the rest: the computation itself succeeded
/// but a precondition of the requested statement does not hold.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToricError {
    #[error("matrix dimensions must be positive (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    RaggedMatrix {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("malformed fan: {0}")]
    MalformedFan(String),

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("ray {index} {ray:?} is not primitive")]
    NonPrimitiveRay { index: usize, ray: Vec<i64> },

    #[error("duplicate ray {ray:?} at indices {first} and {second}")]
    DuplicateRay {
        ray: Vec<i64>,
        first: usize,
        second: usize,
    },

    #[error("new ray {0:?} is already a ray of the fan")]
    ExistingRay(Vec<i64>),

    #[error("vector {0:?} does not lie in the support of the fan")]
    OutsideSupport(Vec<i64>),

    #[error("divisor is not Cartier on cone {cone}")]
    NotCartier { cone: usize },

    #[error("operation requires dimension {expected}, fan has dimension {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("polytope is unbounded")]
    UnboundedPolytope,

    #[error("chamber {pattern:?} has nonzero reduced cohomology but is unbounded")]
    UnboundedChamber { pattern: Vec<usize> },

    #[error("divisor is not nef")]
    NotNef,

    #[error("class is not effective: graded piece is empty")]
    EmptyBasis,

    #[error("hypothesis failed: {0}")]
    Hypothesis(String),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),

    #[error("catalog entry `{name}` failed its self-check: {detail}")]
    CatalogMismatch { name: String, detail: String },
}

pub type Result<T> = std::result::Result<T, ToricError>;

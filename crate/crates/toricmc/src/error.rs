use thiserror::Error;

/// Crate-wide error type. CLI exit codes group these into input errors
/// (exit 2) and budget exhaustion (exit 3); negative mathematical verdicts
/// are ordinary return values, not errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("enumeration budget exceeded after {candidates} candidates (cap {cap})")]
    EnumerationBudgetExceeded { candidates: usize, cap: usize },

    #[error("ambient dimension {dim} exceeds the Graver cap {cap}")]
    AmbientDimensionTooLarge { dim: usize, cap: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parameter point yields an identically zero density")]
    DegenerateParameter,

    #[error("parameter must be strictly positive: {0}")]
    NonPositiveParameter(String),

    #[error("sample spaces do not match: {0}")]
    SampleSpaceMismatch(String),

    #[error("face restriction has empty support")]
    EmptySupport,

    #[error("model matrix has duplicate columns {0} and {1}; the design needs distinct support points")]
    DuplicateColumns(usize, usize),

    #[error("point is not in the design")]
    PointNotInDesign,

    #[error("invalid trajectory: step {from} -> {to} is not an arc of the graph")]
    InvalidTrajectory { from: String, to: String },

    #[error("trajectory passes through a zero-weight transition")]
    ZeroWeightOnPath,

    #[error("row sum at vertex {0} is zero; cannot normalize")]
    ZeroRowSum(String),

    #[error("pi is not stationary for P (residual {0:e})")]
    StationarityViolated(f64),

    #[error("support asymmetry: {0} -> {1} is positive but the reverse is not")]
    SupportAsymmetry(String, String),

    #[error("reverse of a trajectory arc is missing from the kernel support")]
    ArcMissingReverse(String, String),

    #[error("cut family is rank-deficient")]
    DependentCuts,

    #[error("off-diagonal mass at vertex {0} exceeds one; no loop mass left")]
    RowSumExceedsOne(String),

    #[error("kernel is not reversible: {0}")]
    NotReversible(String),

    #[error("combiner exceeds min(u,v) at states ({0},{1})")]
    CombinerViolation(String, String),

    #[error("linear system is singular")]
    SingularSystem,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

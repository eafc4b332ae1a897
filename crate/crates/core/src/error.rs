use alloc::string::String;

/// Errors reported by the CHM solvers and reductions.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite coordinate in input")]
    NonFinite,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate bisector: query and iterate coincide")]
    DegenerateBisector,
    #[error("iterate already at query point")]
    AtQueryPoint,
    #[error("all simplex weights are zero")]
    ZeroWeights,
    #[error("input is not a witness: projection coefficient {t} for point {index} is not positive")]
    NotAWitness { index: usize, t: f64 },
    #[error("row {0} of A is zero with b = 0; cannot normalize its column")]
    DegenerateRow(usize),
    #[error("witness last coordinate {0} is not positive")]
    NonPositiveAlpha(f64),
    #[error("recovered x violates strict feasibility at row {row} (slack {slack})")]
    StrictCheckFailed { row: usize, slack: f64 },
    #[error("gamma {gamma} is below the floor {floor}; increase M or decrease epsilon")]
    GammaDegenerate { gamma: f64, floor: f64 },
    #[error("points do not affinely span the ambient space")]
    DimensionDeficient,
    #[error("no candidate points outside the working set")]
    NoCandidates,
    #[error("oracle hit its iteration limit while querying point {point}")]
    OracleLimit { point: usize },
    #[error("solver hit its iteration limit after {0} iterations")]
    IterationLimit(usize),
    #[error("linear algebra failure: {0}")]
    Numerical(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

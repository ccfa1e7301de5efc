use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("empty matrix")]
    Empty,

    #[error("mixed exact and float operands")]
    MixedArithmetic,

    #[error("expected exact rational entries")]
    NotExact,

    #[error("non-finite value: {0}")]
    NonFinite(f64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("minor size {size} out of range 1..={max}")]
    MinorSizeOutOfRange { size: usize, max: usize },

    #[error("invalid minor selector: {0}")]
    InvalidSelector(String),

    #[error("points must be nonempty and strictly increasing")]
    PointsNotIncreasing,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("matrix has no grid points attached")]
    MissingGrid,

    #[error("kernel table has no value at point {0}")]
    Untabulated(String),

    #[error("malformed order spec: {0}")]
    MalformedSpec(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("input is not totally nonnegative: {0}")]
    NotTotallyNonnegative(String),

    #[error("generator self-check failed: {0}")]
    GeneratorCheck(String),

    #[error("no violation predicted in this regime: {0}")]
    Regime(String),

    #[error("unknown catalog id {0}")]
    UnknownId(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

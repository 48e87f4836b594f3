use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("function `{name}` takes {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("unknown registry cost `{0}`")]
    UnknownCost(String),

    #[error("cost matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },

    #[error("empty cost matrix")]
    EmptyMatrix,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("brute-force assignment supports m <= {max}, got {m}")]
    TooLarge { m: usize, max: usize },

    #[error("cost evaluation failed in cell ({i}, {j}) at ({x}, {y})")]
    CellEvaluation { i: usize, j: usize, x: f64, y: f64 },

    #[error("invalid grid spec: {0}")]
    InvalidGrid(String),

    #[error("invalid shuffle of M: {0}")]
    InvalidShuffle(String),

    #[error("point ({x}, {y}) outside the unit square")]
    Domain { x: f64, y: f64 },

    #[error("point {index} = ({x}, {y}) outside [0,1)^2")]
    PointOutOfRange { index: usize, x: f64, y: f64 },

    #[error("cross derivative is not positive at ({x}, {y}): {value}")]
    CrossDerivative { x: f64, y: f64, value: f64 },

    #[error("invalid phi spec: {0}")]
    InvalidPhi(String),

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("bisection did not converge in {0} iterations")]
    NoConvergence(usize),

    #[error("non-finite function value at {0}")]
    NonFiniteValue(f64),

    #[error("invalid quadrature request: {0}")]
    InvalidQuadrature(String),

    #[error("empty support set")]
    EmptySupport,

    #[error("negative matrix entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("invalid sequence parameters: {0}")]
    InvalidSequence(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

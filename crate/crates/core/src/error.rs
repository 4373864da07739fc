use thiserror::Error;

/// Errors raised by the curvature engine and its front ends.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} must be positive")]
    NonPositive { what: &'static str },

    #[error("vectors are linearly dependent (rank deficient at index {index})")]
    RankDeficient { index: usize },

    #[error("matrix is not skew-symmetric: entry ({row},{col}) breaks antisymmetry")]
    NotSkew { row: usize, col: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("missing derivative data: {0}")]
    MissingDerivativeData(String),

    #[error("missing constant `{0}` for the requested bound")]
    MissingConstant(&'static str),

    #[error("evaluation point is not on the sphere bundle: |a|^2 = {norm_sq}, r^2 = {radius_sq}")]
    OffSphere { norm_sq: String, radius_sq: String },

    #[error("fiber part of vector {index} is not orthogonal to the evaluation point")]
    NotTangent { index: usize },

    #[error("plane is degenerate")]
    DegeneratePlane,

    #[error("empty parameter grid")]
    EmptyGrid,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {coord} of point {point} is not finite")]
    NonFinite { point: usize, coord: usize },

    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("{0} requires a nonempty input")]
    Empty(&'static str),

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("equivalence search cap exceeded: {vertices} vertices > cap {cap}")]
    SearchCapExceeded { vertices: usize, cap: usize },

    #[error("boundary degree {degree} out of range 1..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("complex is truncated at dimension {dim_cap}; degree {degree} is not exact")]
    Truncated { dim_cap: usize, degree: usize },

    #[error("window side {side} along axis {axis} is smaller than the cell size {gamma}")]
    WindowTooSmall { axis: usize, side: f64, gamma: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

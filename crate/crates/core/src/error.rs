use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate triangle (signed area {area:e})")]
    DegenerateTriangle { area: f64 },

    #[error("triangulation has no triangles")]
    EmptyMesh,

    #[error("malformed mesh file: {0}")]
    Parse(String),

    #[error("invalid mesh: {0}")]
    Validation(String),

    #[error("invalid mesh for this operation: {0}")]
    InvalidMesh(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Padua points {first} and {second} are both attributed to triangle {triangle}")]
    AttributionNotInjective {
        first: usize,
        second: usize,
        triangle: usize,
    },

    #[error("Padua point {point} ({x}, {y}) lies in no triangle")]
    PointUnassigned { point: usize, x: f64, y: f64 },

    #[error("selection is rank deficient: pivot {step} has magnitude {magnitude:e}")]
    RankDeficient { step: usize, magnitude: f64 },

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("constraint matrix is rank deficient (pivot {step}, magnitude {magnitude:e})")]
    RankDeficientConstraints { step: usize, magnitude: f64 },

    #[error("design matrix is rank deficient (pivot {step}, magnitude {magnitude:e})")]
    RankDeficientDesign { step: usize, magnitude: f64 },

    #[error("augmented KKT system could not be solved: {0}")]
    SingularKkt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

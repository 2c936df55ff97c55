use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cell {cell} is degenerate (measure {measure:e})")]
    DegenerateCell { cell: usize, measure: f64 },

    #[error("point lies outside cell {cell} (barycentric coordinate {lambda:e})")]
    PointOutsideCell { cell: usize, lambda: f64 },

    #[error("negative diffusion parameter {0:e} passed to a Bernoulli kernel")]
    NegativeEpsilon(f64),

    #[error("diffusion coefficient must be positive{}, got {value:e}", cell.map(|c| format!(" on cell {c}")).unwrap_or_default())]
    NonPositiveDiffusion { cell: Option<usize>, value: f64 },

    #[error("unsupported form degree k={k} in dimension {dim}")]
    UnsupportedDegree { dim: usize, k: usize },

    #[error("missing boundary value for constrained dof {0}")]
    MissingBoundaryValue(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("singular factorization: {0}")]
    Singular(String),

    #[error("iterative solver stalled after {iterations} iterations (relative residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("field evaluation produced a non-finite value at {0:?}")]
    NonFinite([f64; 3]),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

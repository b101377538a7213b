use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported or degenerate domain: {0}")]
    Domain(&'static str),
    #[error("edge {0} does not exist in the mesh")]
    UnknownEdge(usize),
    #[error("edge {0} is a boundary edge, expected an interior edge")]
    BoundaryEdge(usize),
    #[error("edge {0} is an interior edge, expected a boundary edge")]
    InteriorEdge(usize),
    #[error("triangle {0} is degenerate (zero area)")]
    DegenerateTriangle(usize),
    #[error("meshes are not nested: {0}")]
    NotNested(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("boundary data is negative ({value:e}) at node {node}")]
    InfeasibleBoundary { node: usize, value: f64 },
    #[error("{solver} did not converge within {iterations} iterations")]
    NoConvergence { solver: &'static str, iterations: usize },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("the estimator vanishes, nothing to mark")]
    ZeroEstimator,
    #[error("obstacle has no analytic Laplacian")]
    MissingLaplacian,
    #[error("shifted boundary data g - chi is negative ({value:e}) at ({x}, {y})")]
    ObstacleAboveData { x: f64, y: f64, value: f64 },
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("need at least {needed} data points, got {got}")]
    InsufficientData { needed: usize, got: usize },
}

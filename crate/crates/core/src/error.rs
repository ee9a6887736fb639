use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular Jacobian in linear solve")]
    SingularJacobian,

    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("point is not on the model (residual {0:e})")]
    NotOnModel(f64),
    #[error("point is singular on the model: Jacobian rank {rank}, codimension {codim}")]
    SingularPoint { rank: usize, codim: usize },

    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope is empty")]
    Empty,
    #[error("center is not in the relative interior of the polytope")]
    CenterNotInterior,

    #[error("coordinate {index} of the data point is not positive")]
    NonpositiveCoordinate { index: usize },
    #[error("invalid data point: {0}")]
    InvalidData(String),
    #[error("maximum likelihood is attained at {} grid points", .0.len())]
    Tie(Vec<Vec<u64>>),
    #[error("iterate left the parameter domain")]
    LeftDomain,
    #[error("random matrices lost rank after {0} draws")]
    RankDeficient(usize),
    #[error("no critical point found")]
    NoCriticalPointFound,
    #[error("rejection sampling stalled (acceptance rate {0:e})")]
    RejectionStalled(f64),

    #[error("grid point coordinate {index} is {value}, but all coordinates must exceed 1")]
    CoordinateTooSmall { index: usize, value: u64 },
    #[error("functional is constant on the polytope")]
    TrivialFace,
    #[error("invalid partition pair: {0}")]
    InvalidPartition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

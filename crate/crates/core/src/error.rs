use thiserror::Error;

/// Errors raised by grid construction, the sub-problem solvers and the outer iteration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HvError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid metric parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: String,
        got: String,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("velocity must vanish on the spatial boundary (time slice {slice})")]
    BoundaryVelocity { slice: usize },

    #[error("trajectories cross at time slice {slice}; refine the time step or damp the velocity")]
    FoldOver { slice: usize },

    #[error("trajectories {index} and {} collapse at time slice {slice}", index + 1)]
    Collapse { slice: usize, index: usize },

    #[error(
        "epsilon = 0 is not supported by the fourth-order solve: without the curvature \
         penalty the distance between distinct constants has no minimizer \
         (see analysis::competitor_path and analysis::halving_path)"
    )]
    DegenerateMetric,

    #[error("banded factorization failed in time slice {slice} (zero pivot in column {column})")]
    Singular { slice: usize, column: usize },

    #[error("nx = {nx} is not divisible by {factor}")]
    Divisibility { nx: usize, factor: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("every initialization failed: {}", .0.join("; "))]
    AllInitializationsFailed(Vec<String>),
}

pub type Result<T> = std::result::Result<T, HvError>;

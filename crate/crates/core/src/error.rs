use thiserror::Error;

/// Errors raised by the boundary vortex method and its supporting kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A kernel was evaluated within the cutoff distance of its singular set.
    #[error("singular evaluation: {what} (distance {distance:e} below cutoff {cutoff:e})")]
    SingularEvaluation {
        what: &'static str,
        distance: f64,
        cutoff: f64,
    },

    /// Evaluation point outside the validity domain of a field.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    /// The constrained cotangent system lost rank. Never expected on a uniform mesh.
    #[error("numerical singularity: {0}")]
    NumericalSingularity(String),

    #[error("collision between free vortices {first} and {second} (distance {distance:e})")]
    Collision {
        first: usize,
        second: usize,
        distance: f64,
    },

    #[error("free vortex {index} reached the boundary layer (|y| = {radius})")]
    BoundaryCollision { index: usize, radius: f64 },
}

impl Error {
    /// Short machine-readable tag, used by the CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::SingularEvaluation { .. } => "singular_evaluation",
            Error::Domain(_) => "domain",
            Error::SizeMismatch { .. } => "size_mismatch",
            Error::NumericalSingularity(_) => "numerical_singularity",
            Error::Collision { .. } => "collision",
            Error::BoundaryCollision { .. } => "boundary_collision",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("instance must contain at least one vector")]
    EmptyInstance,

    #[error("integer system has no solution")]
    NoSolution,

    #[error("constraint system is infeasible")]
    EmptySystem,

    #[error("point {0} is not in the image lattice of the projection")]
    NotInImageLattice(String),

    #[error("point {0} does not lie in the half-open zonotope")]
    EmptyFiber(String),

    #[error("instance is rank deficient (rank {rank} < ambient dimension {ambient})")]
    RankDeficient { rank: usize, ambient: usize },

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("verification failed: {0}")]
    VerificationFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

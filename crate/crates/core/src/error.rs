use thiserror::Error;

/// Errors produced by the numeric layers of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series diverges: {0}")]
    Divergence(String),

    /// A requested truncation or matrix dimension exceeded the configured cap.
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("infeasible constraint set: {0}")]
    Infeasible(String),

    /// g²(0) is undefined when the mean photon number vanishes.
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    /// The √P objective has no gradient where a probability is exactly zero.
    #[error("undefined gradient: {0}")]
    UndefinedGradient(String),
}

pub type Result<T> = std::result::Result<T, Error>;

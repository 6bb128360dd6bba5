use thiserror::Error;

/// Errors raised by projections, solvers and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid convex set: {0}")]
    InvalidSet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} outside admissible range ({lo}, {hi}): {value}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("intersection looks empty: Dykstra increment stalled at {increment:e} after {cycles} cycles")]
    SuspectedEmpty { cycles: usize, increment: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

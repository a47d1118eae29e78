use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Caller misuse: out-of-range order, malformed input and the like.
    #[error("usage error: {0}")]
    Usage(String),

    /// No admissible stationary point was found for a variational problem.
    #[error("optimization failed at order {order}: {reason}")]
    Optimization { order: usize, reason: String },

    /// The ODE integrator or the quadrature gave up.
    #[error("integration failed: {0}")]
    Integration(String),

    /// A postcondition that holds by construction was violated.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    /// Text could not be parsed into a number.
    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
}

pub type Result<T> = std::result::Result<T, Error>;

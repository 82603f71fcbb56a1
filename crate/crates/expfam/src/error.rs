use thiserror::Error;

use crate::numeric::newton::NewtonReport;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is outside the support of the {1} family")]
    OutOfSupport(f64, &'static str),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("operation not supported for the {0} family")]
    Unsupported(&'static str),

    #[error("empty input")]
    EmptyInput,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("linear system is numerically singular")]
    SingularHessian,

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("infeasible moment target: {0}")]
    Infeasible(String),

    #[error("solver did not converge: {iterations} iterations, gradient norm {final_grad_norm:e}",
            iterations = .0.iterations, final_grad_norm = .0.final_grad_norm)]
    NotConverged(NewtonReport),

    #[error("feasible set is a single point; no competitor distributions exist")]
    DegenerateNullSpace,

    #[error(
        "primal oracle limited to K <= 6 support points and d <= 2 constraints (got K={k}, d={d})"
    )]
    OracleScaleExceeded { k: usize, d: usize },

    #[error("map is not injective on the support points")]
    NonInjectiveOnSupport,

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

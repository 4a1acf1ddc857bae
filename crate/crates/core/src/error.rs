//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {reason}")]
    Domain { func: &'static str, reason: String },

    /// A distribution or configuration parameter is invalid.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A sample violates the support or size requirements of the estimator.
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    /// Quadrature hit its refinement cap before meeting the tolerance.
    #[error("accuracy target not met: best estimate {estimate:e}, error bound {error_bound:e}")]
    Accuracy { estimate: f64, error_bound: f64 },

    /// An iterative series or continued fraction did not converge.
    #[error("{func} failed to converge after {iterations} iterations")]
    Convergence {
        func: &'static str,
        iterations: usize,
    },

    /// Exhaustive enumeration would exceed its work budget.
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        func,
        reason: reason.into(),
    }
}

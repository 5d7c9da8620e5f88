use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exhaustive computation would exceed its configured cap.
    #[error("resource cap exceeded: {what} needs {needed} items (cap {cap})")]
    ResourceCap {
        what: String,
        needed: u128,
        cap: u128,
    },

    /// An iterative method stopped before meeting its tolerance.
    #[error("no convergence after {iterations} iterations; value bracketed in [{lower}, {upper}]")]
    NonConvergence {
        iterations: usize,
        lower: f64,
        upper: f64,
    },

    /// Numerical integration could not meet its error target.
    #[error("quadrature failed: estimate {estimate} with error {error}")]
    Quadrature { estimate: f64, error: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

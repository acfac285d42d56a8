use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The data cannot produce a valid (positive, finite) estimate.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// An order-statistic window holds fewer observations than required.
    #[error("window ({a}, {b}) holds {size} observation(s) at n = {n}, need at least {required}; smallest admissible n is {min_n}")]
    Window {
        a: f64,
        b: f64,
        n: usize,
        size: usize,
        required: usize,
        min_n: usize,
    },

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge on [{lower}, {upper}]: error estimate {error_estimate:e} after {intervals} subintervals")]
    Quadrature {
        lower: f64,
        upper: f64,
        error_estimate: f64,
        intervals: usize,
    },

    /// A Monte Carlo replicate failed to evaluate its statistic.
    #[error("replicate {index}: {source}")]
    Replicate {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn estimation(msg: impl Into<String>) -> Self {
        Error::Estimation(msg.into())
    }
}

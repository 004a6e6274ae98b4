use thiserror::Error;

/// Errors raised by the design engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method failed to converge; carries its best estimate.
    #[error("numeric error: {message} (best estimate {best_estimate})")]
    Numeric { message: String, best_estimate: f64 },

    /// The operation was invoked with an unsupported combination of inputs.
    #[error("usage error: {0}")]
    Usage(String),

    /// The requested exact computation is too large.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// No threshold below one protects the requested error rate.
    #[error("calibration infeasible: FWER {fwer} exceeds alpha {alpha} at the largest threshold")]
    CalibrationInfeasible { fwer: f64, alpha: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

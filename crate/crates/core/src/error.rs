use alloc::string::String;

/// Errors raised by the numerical routines and simulators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge within the depth limit (best estimate {estimate})")]
    NonConvergence { estimate: f64 },

    #[error("integrand is not finite on the interval")]
    NonFinite,

    #[error("root is not bracketed: g({lo}) = {g_lo}, g({hi}) = {g_hi}")]
    NoBracket { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("grid length {0} is not a power of two")]
    GridSize(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("enumeration needs {needed} assignments, budget is {budget}")]
    Budget { needed: u128, budget: u128 },

    #[error("homodyne sampling hit a degenerate marginal {0} times in a row")]
    DegenerateMarginal(u32),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

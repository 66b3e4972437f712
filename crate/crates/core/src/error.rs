use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The function is not defined (or diverges) at the requested arguments.
    #[error("argument outside the function domain: a = {a}, x = {x}")]
    Domain { a: f64, x: f64 },
    #[error("result overflows f64")]
    Overflow,
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    /// The series tail bound was not met within `SeriesControl::max_order`.
    #[error("series truncation failed at order {order} (last term {last_term:e})")]
    Truncation { order: usize, last_term: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("infeasible power allocation: {0}")]
    InfeasiblePower(&'static str),
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

impl Error {
    /// True for failures that come from the numerics rather than the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Overflow | Error::NoConvergence(_) | Error::Truncation { .. }
        )
    }
}

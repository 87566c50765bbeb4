use thiserror::Error;

/// Errors raised at the library's API boundary.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar parameter lies outside its admissible range.
    #[error("{name} = {value} is outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// An operator failed a structural precondition (unitarity, hermiticity, block shape).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The request is well-typed but cannot be answered (ill-conditioned fit, empty input).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    range: &'static str,
) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::Domain { name, value, range })
    }
}

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of a special function.
    #[error("{function}: argument {value} outside domain ({expected})")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// A model parameter failed validation.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// A computed probability left [0, 1] by more than rounding noise.
    #[error("internal consistency: {quantity} = {value} is not a probability")]
    Consistency { quantity: &'static str, value: f64 },
}

impl Error {
    pub(crate) fn domain(function: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            function,
            value,
            expected,
        }
    }

    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}

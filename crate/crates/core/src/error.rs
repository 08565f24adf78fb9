use thiserror::Error;

/// Errors returned by the numerical routines and the verification grid.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the function.
    #[error("{function}: {message}")]
    Domain { function: &'static str, message: String },
    /// The result is finite mathematically but not representable in binary64.
    /// `log_value` is the natural logarithm of the true result.
    #[error("{function}: result overflows binary64 (log value {log_value}); use the log-domain variant")]
    Overflow { function: &'static str, log_value: f64 },
    /// Invalid grid or command configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(function: &'static str, message: impl Into<String>) -> Error {
    Error::Domain {
        function,
        message: message.into(),
    }
}

use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} outside the domain of {name}")]
    Domain { name: &'static str, value: f64 },

    #[error(
        "integration failed for mode k = {k}: {reason} (steps = {steps}, s = {position})"
    )]
    Integration {
        k: f64,
        reason: String,
        steps: usize,
        position: f64,
    },

    #[error("mode {index} failed: {source}")]
    Mode {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("probability {value} for k = {k} lies outside [0, 1] beyond round-off slack")]
    Probability { k: f64, value: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("{0}")]
    Analysis(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}

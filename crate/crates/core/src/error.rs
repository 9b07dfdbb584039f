use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the interval on which the operation is defined.
    #[error("{what} = {value} outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    /// An integrand produced a non-finite value.
    #[error("integrand not finite at node {node} (value {value})")]
    Evaluation { node: f64, value: f64 },
    /// A value to invert lies outside a monotone table.
    #[error("value {value} outside table range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(what: &'static str, value: f64, lo: f64, hi: f64) -> Error {
    Error::Domain {
        what,
        value,
        lo,
        hi,
    }
}

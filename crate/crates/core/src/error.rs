use thiserror::Error;

use crate::eigen::EigenResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// A bracket of the `h` integrand vanished or went negative away from `y = 1`.
    #[error("pole in integrand at y = {y}: bracket = {bracket}")]
    Pole { y: f64, bracket: f64 },

    #[error("integrand returned a non-finite value at interior point x = {x}")]
    NonFiniteSample { x: f64 },

    #[error("quadrature did not reach tolerance: value {value}, error estimate {error_estimate}")]
    QuadratureNotConverged { value: f64, error_estimate: f64 },

    #[error("integral diverges")]
    Divergent,

    #[error("function is numerically zero (q-norm {norm:e})")]
    ZeroFunction { norm: f64 },

    #[error("no start converged; best lambda {:.12}", best.lambda)]
    NotConverged { best: Box<EigenResult> },

    #[error("could not bracket the critical parameter: {0}")]
    Bracket(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

use thiserror::Error;

/// Errors raised by the numerical kernels, builders and checks.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("lambda = {lambda} lies in (or too close to) the spectrum: condition estimate {condition:.3e}")]
    Singular { lambda: f64, condition: f64 },

    #[error("lambda = {lambda} does not exceed the growth bound omega = {omega}")]
    Divergence { lambda: f64, omega: f64 },

    #[error("no convergence after {iterations} iterations (best value {best}, gap {gap:.3e})")]
    Convergence {
        best: f64,
        gap: f64,
        iterations: usize,
    },

    #[error("pairing error: {0}")]
    Pairing(String),

    #[error("positivity error: {0}")]
    Positivity(String),

    #[error("domination error: {0}")]
    Domination(String),

    #[error("quadrature error estimate {estimate:.3e} exceeds the admissible {limit:.3e}")]
    Precision { estimate: f64, limit: f64 },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("check not applicable: {0}")]
    Inapplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

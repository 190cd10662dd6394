use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma pole at z = {0}")]
    GammaPole(Complex64),

    #[error("{function}: parameter {value} is a nonpositive integer")]
    ParameterPole {
        function: &'static str,
        value: Complex64,
    },

    #[error("{function}: series did not converge within {max_terms} terms")]
    NonConvergence {
        function: &'static str,
        max_terms: usize,
    },

    #[error("quadrature did not converge after {levels} step halvings")]
    QuadratureNonConvergence { levels: u32 },

    #[error("{function}: degenerate parameter 2mu = {two_mu} (connection formula undefined)")]
    DegenerateParameter {
        function: &'static str,
        two_mu: Complex64,
    },

    #[error("{function}: {message}")]
    Domain {
        function: &'static str,
        message: String,
    },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("design matrix condition number {cond:.3e} exceeds {limit:.1e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("finite-difference residual unstable under step halving at x = {x}: {coarse:.3e} vs {fine:.3e}")]
    StepInstability { x: f64, coarse: f64, fine: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(function: &'static str, message: impl Into<String>) -> Error {
    Error::Domain {
        function,
        message: message.into(),
    }
}

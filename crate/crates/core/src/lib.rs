//! Polynomial representation of Whittaker functions by products of
//! modified Bessel functions, with numerical verification tooling.

pub mod error;
pub mod kernels;
pub mod lambda;
pub mod numeric;
pub mod ode;
pub mod oracle;
pub mod report;
pub mod suite;

pub use error::{Error, Result};

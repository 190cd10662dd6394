//! Special-function kernels: Kummer, Whittaker and modified Bessel functions.

mod bessel;
mod config;
pub(crate) mod hypergeometric;

pub use bessel::{bessel_i, bessel_i_tilde, bessel_k_quad, bessel_k_via_w};
pub(crate) use bessel::bessel_k_via_w_dd;
pub use config::{EvalConfig, OrderParams};
pub use hypergeometric::{kummer_m, whittaker_m, whittaker_w};
pub(crate) use hypergeometric::whittaker_w_dd;

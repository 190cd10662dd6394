//! Scalar and polynomial building blocks shared by every other module.

pub mod dd;
mod gamma;
mod laguerre;
mod poly;

pub use gamma::{gamma, log_gamma, pochhammer};
pub use laguerre::{laguerre, laguerre_coeffs};
pub use poly::PolyC;

/// All complex scalars in the crate.
pub type ComplexValue = num_complex::Complex64;

pub const I: ComplexValue = ComplexValue::new(0.0, 1.0);

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}

/// `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_diff(a: ComplexValue, b: ComplexValue, floor: f64) -> f64 {
    let scale = a.norm().max(b.norm()).max(floor);
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

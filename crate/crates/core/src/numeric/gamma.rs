use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

// Godfrey's coefficients for g = 607/128, 15 terms.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_189e-5,
    4.652_362_892_704_858e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_125e-4,
    -2.102_644_417_241_049e-4,
    2.174_396_181_152_126_4e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_275e-5,
    -2.619_083_840_158_141e-5,
    3.689_918_265_953_162_4e-6,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// Principal branch of `ln Gamma(z)`.
///
/// Lanczos sum for `Re z >= 1/2`; the reflection formula otherwise, with the
/// `2 pi i` correction that keeps the result on the principal branch
/// (continuous off the negative real axis, `ln Gamma(z+1) = ln Gamma(z) + ln z`).
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::GammaPole(z));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(crate::error::domain("log_gamma", format!("non-finite argument {z}")));
    }
    if z.re < 0.5 {
        let sign = if z.im < 0.0 { -1.0 } else { 1.0 };
        let branch = Complex64::new(PI.ln(), sign * TAU * (0.5 * z.re + 0.25).floor());
        let s = (z * PI).sin();
        return Ok(branch - s.ln() - log_gamma(1.0 - z)?);
    }
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += *c / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    Ok(LN_SQRT_2PI + (zm1 + 0.5) * t.ln() - t + acc.ln())
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

/// Rising factorial `z (z+1) ... (z+n-1)`.
pub fn pochhammer(z: Complex64, n: u32) -> Complex64 {
    (0..n).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z + j as f64))
}

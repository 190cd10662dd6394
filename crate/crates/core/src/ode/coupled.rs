//! The coupled second-order equation for `Lambda` and its conjugate.

use num_complex::Complex64;

use crate::lambda::CoeffVector;
use crate::numeric::{PolyC, I};
use crate::report::ResidualReport;

pub const COUPLED_THRESHOLD: f64 = 1e-12;

/// `x P'' + (1 - 2ik) P' + (1 + 2n) P - 2x (P')^* - P^*` as a polynomial.
pub fn coupled_polynomial(p: &PolyC, n: u32, k: f64) -> PolyC {
    let d1 = p.derivative();
    let d2 = d1.derivative();
    let one = Complex64::new(1.0, 0.0);
    d2.shift_up(1) + &d1 * (one - 2.0 * I * k) + p * Complex64::new(1.0 + 2.0 * n as f64, 0.0)
        - &d1.conj().shift_up(1) * Complex64::new(2.0, 0.0)
        - p.conj()
}

/// Coefficient-level residual of the coupled equation for `Lambda = lambda/x`.
///
/// The grid of the report is the power of `x`; each residual is the
/// magnitude of that coefficient over the largest coefficient of `Lambda`.
pub fn coupled_residual(cv: &CoeffVector) -> ResidualReport {
    let lam = cv.big_lambda();
    let r = coupled_polynomial(&lam, cv.params.n, cv.params.k);
    let scale = lam.max_coeff_norm().max(f64::MIN_POSITIVE);
    let len = cv.params.n as usize + 1;
    let grid = (0..len).map(|j| j as f64).collect();
    let residuals = (0..len).map(|j| r.coeff(j).norm() / scale).collect();
    ResidualReport::new("coupled", cv.params, grid, residuals, COUPLED_THRESHOLD)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::OrderParams;
    use crate::lambda::coeffs_from_recurrence;

    #[test]
    fn constant_lambda_for_n0() {
        let cv = coeffs_from_recurrence(OrderParams::new(0, 1.0).unwrap()).unwrap();
        let r = coupled_residual(&cv);
        assert_eq!(r.max_residual(), 0.0);
        assert!(r.pass);
    }

    #[test]
    fn exact_for_generated_coefficients() {
        for n in [1, 4, 11] {
            for k in [0.1, 2.0] {
                let cv = coeffs_from_recurrence(OrderParams::new(n, k).unwrap()).unwrap();
                let r = coupled_residual(&cv);
                assert!(r.pass, "n={n} k={k}: {}", r.max_residual());
            }
        }
    }
}

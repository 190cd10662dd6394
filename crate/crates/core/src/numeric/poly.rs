use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dense polynomial with complex coefficients, ascending degree.
///
/// Trailing zero coefficients are trimmed, so the zero polynomial has an
/// empty coefficient list and `degree() == None`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct PolyC {
    coeffs: Vec<Complex64>,
}

impl PolyC {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        PolyC { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    pub fn zero() -> Self {
        PolyC { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `x^j`, zero beyond the stored degree.
    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest power with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| *c != Complex64::new(0.0, 0.0))
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * j as f64)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }

    /// Conjugates every coefficient; for real `x` this is `p(x)*`.
    pub fn conj(&self) -> Self {
        PolyC {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Multiply by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
        coeffs.extend_from_slice(&self.coeffs);
        PolyC { coeffs }
    }

    /// Divide by `x^k`, discarding the low coefficients (callers check they are zero).
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().skip(k).copied().collect())
    }
}

impl Add for &PolyC {
    type Output = PolyC;
    fn add(self, rhs: &PolyC) -> PolyC {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyC::new((0..n).map(|j| self.coeff(j) + rhs.coeff(j)).collect())
    }
}

impl Add for PolyC {
    type Output = PolyC;
    fn add(self, rhs: PolyC) -> PolyC {
        &self + &rhs
    }
}

impl Sub for &PolyC {
    type Output = PolyC;
    fn sub(self, rhs: &PolyC) -> PolyC {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyC::new((0..n).map(|j| self.coeff(j) - rhs.coeff(j)).collect())
    }
}

impl Sub for PolyC {
    type Output = PolyC;
    fn sub(self, rhs: PolyC) -> PolyC {
        &self - &rhs
    }
}

impl Neg for PolyC {
    type Output = PolyC;
    fn neg(self) -> PolyC {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &PolyC {
    type Output = PolyC;
    fn mul(self, rhs: &PolyC) -> PolyC {
        if self.is_zero() || rhs.is_zero() {
            return PolyC::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyC::new(out)
    }
}

impl Mul for PolyC {
    type Output = PolyC;
    fn mul(self, rhs: PolyC) -> PolyC {
        &self * &rhs
    }
}

impl Mul<Complex64> for &PolyC {
    type Output = PolyC;
    fn mul(self, s: Complex64) -> PolyC {
        self.scale(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c;
    use proptest::prelude::*;

    #[test]
    fn derivative_of_square() {
        let p = PolyC::from_real(&[0.0, 0.0, 1.0]);
        assert_eq!(p.derivative(), PolyC::from_real(&[0.0, 2.0]));
        assert_eq!(PolyC::from_real(&[5.0]).derivative(), PolyC::zero());
    }

    #[test]
    fn evaluate_linear() {
        let p = PolyC::from_real(&[1.0, 2.0]);
        assert_eq!(p.eval_real(3.0), c(7.0, 0.0));
        assert_eq!(PolyC::zero().eval_real(2.0), c(0.0, 0.0));
    }

    #[test]
    fn trailing_zeros_trimmed_and_valuation() {
        let p = PolyC::from_real(&[0.0, 0.0, 3.0, 0.0]);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.valuation(), Some(2));
        assert_eq!(p.shift_down(2), PolyC::from_real(&[3.0]));
        assert_eq!(p.shift_down(2).shift_up(2), p);
    }

    #[test]
    fn product_degrees_add() {
        let p = PolyC::new(vec![c(1.0, 1.0), c(0.0, 2.0)]);
        let q = PolyC::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(3.0, -1.0)]);
        let pq = &p * &q;
        assert_eq!(pq.degree(), Some(3));
        let x = c(0.3, -0.7);
        assert!((pq.eval(x) - p.eval(x) * q.eval(x)).norm() < 1e-14);
    }

    fn arb_poly() -> impl Strategy<Value = PolyC> {
        prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 0..12)
            .prop_map(|v| PolyC::new(v.into_iter().map(|(a, b)| c(a, b)).collect()))
    }

    proptest! {
        #[test]
        fn conj_is_involution(p in arb_poly()) {
            prop_assert_eq!(p.conj().conj(), p);
        }

        #[test]
        fn evaluation_is_linear(p in arb_poly(), q in arb_poly(), xr in -3.0..3.0f64, xi in -3.0..3.0f64) {
            let x = c(xr, xi);
            let lhs = (&p + &q).eval(x);
            let rhs = p.eval(x) + q.eval(x);
            let scale = p.eval(x).norm() + q.eval(x).norm() + 1.0;
            prop_assert!((lhs - rhs).norm() <= 1e-13 * scale);
        }

        #[test]
        fn derivative_lowers_degree(p in arb_poly()) {
            match p.degree() {
                Some(d) if d > 0 => prop_assert_eq!(p.derivative().degree(), Some(d - 1)),
                _ => prop_assert!(p.derivative().is_zero()),
            }
        }
    }
}

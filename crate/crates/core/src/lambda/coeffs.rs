use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernels::OrderParams;
use crate::numeric::dd::{CDd, Dd, DD_PI};
use crate::numeric::{laguerre_coeffs, pochhammer, PolyC, I};
use crate::report::ResidualReport;

/// Largest supported `n`. Coefficients grow like `2^n`; beyond this the
/// double-precision checks stop being meaningful.
pub const N_MAX: u32 = 25;

/// Tolerance on the top coefficient when validating a generated vector.
pub const TOP_COEFF_TOL: f64 = 1e-10;

/// Which Pochhammer symbol seeds `a_1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `a_1 = (-1)^n (1 - ik)_n / sqrt(pi)`; consistent with the recurrence as written.
    MinusIk,
    /// `a_1 = (-1)^n (1 + ik)_n / sqrt(pi)`.
    PlusIk,
}

impl Convention {
    pub const RESOLVED: Convention = Convention::MinusIk;

    pub fn name(self) -> &'static str {
        match self {
            Convention::MinusIk => "minus_ik",
            Convention::PlusIk => "plus_ik",
        }
    }
}

/// Coefficients `a_1 .. a_{n+1}` of `lambda(x) = x Lambda(x) = sum a_m x^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffVector {
    pub params: OrderParams,
    pub convention: Convention,
    a: Vec<Complex64>,
}

impl CoeffVector {
    pub(crate) fn from_parts(params: OrderParams, convention: Convention, a: Vec<Complex64>) -> Self {
        debug_assert_eq!(a.len(), params.n as usize + 1);
        CoeffVector { params, convention, a }
    }

    /// `a_1 .. a_{n+1}`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.a
    }

    /// `a_m`, with `a_0 = 0` and zero above the top.
    pub fn a(&self, m: usize) -> Complex64 {
        if m == 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.a.get(m - 1).copied().unwrap_or_default()
    }

    pub fn top(&self) -> Complex64 {
        *self.a.last().expect("at least one coefficient")
    }

    /// `lambda(x) = x Lambda(x)`.
    pub fn lambda(&self) -> PolyC {
        let mut c = vec![Complex64::new(0.0, 0.0)];
        c.extend_from_slice(&self.a);
        PolyC::new(c)
    }

    /// `Lambda(x) = lambda(x) / x`.
    pub fn big_lambda(&self) -> PolyC {
        PolyC::new(self.a.clone())
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.a.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `{n, k, convention, a: [[re, im], ...]}`.
    pub fn to_value(&self) -> Value {
        json!({
            "n": self.params.n,
            "k": self.params.k,
            "convention": self.convention.name(),
            "a": self.a.iter().map(|c| vec![c.re, c.im]).collect::<Vec<_>>(),
        })
    }
}

fn check_n(n: u32) -> Result<()> {
    if n > N_MAX {
        return Err(crate::error::domain("lambda", format!("n = {n} exceeds the supported maximum {N_MAX}")));
    }
    Ok(())
}

/// `2^n / sqrt(pi)`.
pub fn top_coeff(n: u32) -> f64 {
    2f64.powi(n as i32) / PI.sqrt()
}

/// `(a_1, a_{n+1})` from small- and large-x matching.
pub fn boundary_coeffs(params: OrderParams, convention: Convention) -> (Complex64, Complex64) {
    let n = params.n;
    let ik = I * params.k;
    let seed = match convention {
        Convention::MinusIk => 1.0 - ik,
        Convention::PlusIk => 1.0 + ik,
    };
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let a1 = pochhammer(seed, n) * (sign / PI.sqrt());
    (a1, Complex64::new(top_coeff(n), 0.0))
}

fn seed_dd(params: OrderParams, convention: Convention) -> CDd {
    let k = Dd::from_f64(params.k);
    let seed = match convention {
        Convention::MinusIk => CDd::new(Dd::ONE, -k),
        Convention::PlusIk => CDd::new(Dd::ONE, k),
    };
    let poch = (0..params.n).fold(CDd::ONE, |acc, j| acc * (seed + j as f64));
    let a1 = poch / CDd::from_re(DD_PI.sqrt());
    if params.n % 2 == 0 {
        a1
    } else {
        -a1
    }
}

fn iterate_dd(params: OrderParams, a1: CDd) -> Vec<Complex64> {
    let n = params.n as usize;
    let two_n1 = 2.0 * params.n as f64 + 1.0;
    let k2 = Dd::from_f64(params.k) * 2.0;
    let mut a = Vec::with_capacity(n + 1);
    let mut am = a1;
    a.push(am.to_c64());
    for m in 1..=n {
        let mf = m as f64;
        let den = CDd::new(Dd::from_f64(mf), -k2) * mf;
        am = -(am * two_n1 + am.conj() * (1.0 - 2.0 * mf)) / den;
        a.push(am.to_c64());
    }
    a
}

/// Runs `a_{m+1} = -[(1+2n) a_m + (1-2m) a_m^*] / (m (m - 2ik))` from `a_1`
/// without any validation.
///
/// The iteration amplifies rounding error by up to `1e11` at `n = 20`, so it
/// is carried in double-double and only the results are rounded.
pub fn iterate_recurrence(params: OrderParams, a1: Complex64) -> Vec<Complex64> {
    iterate_dd(params, a1.into())
}

/// [`iterate_recurrence`] from the seed of `convention`, with the seed itself
/// formed in double-double so that its rounding is not amplified either.
pub fn recurrence_from_seed(params: OrderParams, convention: Convention) -> Vec<Complex64> {
    iterate_dd(params, seed_dd(params, convention))
}

/// Relative deviation of the top coefficient from the real value `2^n/sqrt(pi)`.
pub fn top_deviation(params: OrderParams, a: &[Complex64]) -> f64 {
    let want = top_coeff(params.n);
    (a[a.len() - 1] - want).norm() / want
}

/// Coefficients from the first-order recurrence seeded by the resolved `a_1`.
///
/// Fails with [`Error::InvariantViolation`] when the generated top coefficient
/// misses `2^n/sqrt(pi)` by more than [`TOP_COEFF_TOL`].
pub fn coeffs_from_recurrence(params: OrderParams) -> Result<CoeffVector> {
    coeffs_with_convention(params, Convention::RESOLVED)
}

pub fn coeffs_with_convention(params: OrderParams, convention: Convention) -> Result<CoeffVector> {
    check_n(params.n)?;
    let a = recurrence_from_seed(params, convention);
    let dev = top_deviation(params, &a);
    if !(dev <= TOP_COEFF_TOL) {
        return Err(Error::InvariantViolation(format!(
            "{params}, convention {}: top coefficient {} deviates from 2^n/sqrt(pi) by {dev:.3e}",
            convention.name(),
            a[a.len() - 1]
        )));
    }
    Ok(CoeffVector::from_parts(params, convention, a))
}

/// `lambda^0_n(x) = (-1)^n n!/sqrt(pi) x L_n(2x)`.
pub fn laguerre_closed_form(n: u32) -> Result<CoeffVector> {
    check_n(n)?;
    let fact: f64 = (1..=n).map(f64::from).product();
    let scale = if n % 2 == 0 { fact } else { -fact } / PI.sqrt();
    let a = laguerre_coeffs(n)
        .iter()
        .enumerate()
        .map(|(j, c)| Complex64::new(scale * c * 2f64.powi(j as i32), 0.0))
        .collect();
    Ok(CoeffVector::from_parts(OrderParams { n, k: 0.0 }, Convention::RESOLVED, a))
}

/// Relative residual of a three-term relation: `|sum| / sum |terms|`.
fn three_term_residual(terms: [Complex64; 3]) -> f64 {
    let scale: f64 = terms.iter().map(|t| t.norm()).sum();
    if scale == 0.0 {
        0.0
    } else {
        terms.iter().sum::<Complex64>().norm() / scale
    }
}

pub const SECOND_ORDER_THRESHOLD: f64 = 1e-10;

fn second_order_report(
    cv: &CoeffVector,
    check: &str,
    coeffs: impl Fn(f64) -> [Complex64; 3],
) -> ResidualReport {
    let n = cv.params.n as usize;
    let (mut grid, mut residuals) = (Vec::new(), Vec::new());
    if n >= 3 {
        for m in 1..n {
            let [c2, c1, c0] = coeffs(m as f64);
            grid.push(m as f64);
            residuals.push(three_term_residual([c2 * cv.a(m + 2), c1 * cv.a(m + 1), c0 * cv.a(m)]));
        }
    }
    ResidualReport::new(check, cv.params, grid, residuals, SECOND_ORDER_THRESHOLD)
}

/// The second-order recurrence in its printed form:
/// `m(m+1)(2m-1)(m+2ik)(m-1-2ik) a_{m+2} + (1+2n) m (3m^2+m-2ik) a_{m+1}
///  - 4(1+2m)(n+m)(1+n-m) a_m = 0`, for `1 <= m <= n-1`.
///
/// Residuals are advisory. The report is empty for `n <= 2`.
pub fn check_second_order(cv: &CoeffVector) -> ResidualReport {
    let n = cv.params.n as f64;
    let ik = I * cv.params.k;
    second_order_report(cv, "second_order_printed", |m| {
        [
            (m + 2.0 * ik) * (m - 1.0 - 2.0 * ik) * (m * (m + 1.0) * (2.0 * m - 1.0)),
            (3.0 * m * m + m - 2.0 * ik) * ((1.0 + 2.0 * n) * m),
            Complex64::new(-4.0 * (1.0 + 2.0 * m) * (n + m) * (1.0 + n - m), 0.0),
        ]
    })
}

/// The second-order recurrence obtained by eliminating `a^*` from two
/// consecutive steps of the first-order one:
/// `m(m+1)(2m-1)(m+2ik)(m+1-2ik) a_{m+2} + 4(1+2n) m (m^2-ik) a_{m+1}
///  + 4(1+2m)(n+m)(1+n-m) a_m = 0`.
pub fn check_second_order_derived(cv: &CoeffVector) -> ResidualReport {
    let n = cv.params.n as f64;
    let ik = I * cv.params.k;
    second_order_report(cv, "second_order_derived", |m| {
        [
            (m + 2.0 * ik) * (m + 1.0 - 2.0 * ik) * (m * (m + 1.0) * (2.0 * m - 1.0)),
            (m * m - ik) * (4.0 * (1.0 + 2.0 * n) * m),
            Complex64::new(4.0 * (1.0 + 2.0 * m) * (n + m) * (1.0 + n - m), 0.0),
        ]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c;

    fn p(n: u32, k: f64) -> OrderParams {
        OrderParams::new(n, k).unwrap()
    }

    #[test]
    fn boundary_values() {
        let sp = PI.sqrt();
        let (a1, top) = boundary_coeffs(p(0, 2.0), Convention::RESOLVED);
        assert!((a1 - c(1.0 / sp, 0.0)).norm() < 1e-16);
        assert_eq!(top, a1);
        let (a1, top) = boundary_coeffs(p(1, 0.0), Convention::RESOLVED);
        assert!((a1.re + 1.0 / sp).abs() < 1e-16 && (top.re - 2.0 / sp).abs() < 1e-16);
        let (a1, _) = boundary_coeffs(p(1, 1.0), Convention::RESOLVED);
        assert!((a1 - c(-1.0, 1.0) / sp).norm() < 1e-16);
    }

    #[test]
    fn hand_iteration_n1_k1() {
        let cv = coeffs_from_recurrence(p(1, 1.0)).unwrap();
        let sp = PI.sqrt();
        assert!((cv.a(1) - c(-1.0, 1.0) / sp).norm() < 1e-15);
        assert!((cv.a(2) - c(2.0 / sp, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn other_convention_is_rejected() {
        let err = coeffs_with_convention(p(1, 1.0), Convention::PlusIk).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation(_)));
        // at k = 0 the two coincide
        coeffs_with_convention(p(4, 0.0), Convention::PlusIk).unwrap();
    }

    #[test]
    fn laguerre_small_cases() {
        let sp = PI.sqrt();
        let l0 = laguerre_closed_form(0).unwrap();
        assert_eq!(l0.coeffs(), &[c(1.0 / sp, 0.0)]);
        let l1 = laguerre_closed_form(1).unwrap();
        assert!((l1.a(1).re + 1.0 / sp).abs() < 1e-16 && (l1.a(2).re - 2.0 / sp).abs() < 1e-16);
        let l2 = laguerre_closed_form(2).unwrap();
        for (m, want) in [(1, 2.0), (2, -8.0), (3, 4.0)] {
            assert!((l2.a(m).re - want / sp).abs() < 1e-15);
        }
    }

    #[test]
    fn cap_on_n() {
        assert!(coeffs_from_recurrence(p(N_MAX + 1, 1.0)).is_err());
        assert!(laguerre_closed_form(N_MAX + 1).is_err());
    }

    #[test]
    fn second_order_reports() {
        let cv = coeffs_from_recurrence(p(2, 0.5)).unwrap();
        assert!(check_second_order(&cv).is_empty());
        let cv = coeffs_from_recurrence(p(6, 0.5)).unwrap();
        let derived = check_second_order_derived(&cv);
        assert_eq!(derived.grid, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(derived.pass, "{:?}", derived.residuals);
        assert!(!check_second_order(&cv).pass);
    }

    #[test]
    fn polynomial_views() {
        let cv = coeffs_from_recurrence(p(3, 1.0)).unwrap();
        assert_eq!(cv.lambda().degree(), Some(4));
        assert_eq!(cv.lambda().coeff(0), c(0.0, 0.0));
        assert_eq!(cv.big_lambda().degree(), Some(3));
        let v = cv.to_value();
        assert_eq!(v["a"].as_array().unwrap().len(), 4);
        assert_eq!(v["convention"], "minus_ik");
    }
}

//! Constants `c1..c4` expressing `Lambda` in the product basis
//! `c1 I M + c2 I W + c3 K W + c4 K M`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::kernels::{bessel_i, bessel_k_quad, bessel_k_via_w, whittaker_m, whittaker_w, EvalConfig, OrderParams};
use crate::lambda::{laguerre_closed_form, CoeffVector};
use crate::numeric::{gamma as gam, log_gamma, I};
use crate::report::ResidualReport;

pub const RELATION_TOL: f64 = 1e-10;
pub const RECONSTRUCTION_THRESHOLD: f64 = 1e-6;
pub const RECONSTRUCTION_X_RANGE: (f64, f64) = (0.5, 6.0);
pub const RECONSTRUCTION_GRID: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 6.0];
/// `k` at which the small-`k` limits are probed.
pub const K_LIMIT_PROBE: f64 = 1e-3;
/// Allowed deviation from the `k = 0` limits, in units of `k`.
pub const K_LIMIT_SLOPE: f64 = 10.0;

/// `c2, c3, c4`; `c1 = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolutionConstants {
    pub c2: Complex64,
    pub c3: Complex64,
    pub c4: Complex64,
}

impl SolutionConstants {
    pub fn scaled(self, s: f64) -> Self {
        SolutionConstants {
            c2: self.c2 * s,
            c3: self.c3 * s,
            c4: self.c4 * s,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsSource {
    ClosedForm,
    LinearSystem,
}

/// Both candidate constant sets and the evidence for choosing one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsResolution {
    pub params: OrderParams,
    pub closed_form: SolutionConstants,
    /// Published relations 1 to 3 evaluated at the closed forms.
    pub printed_relation_residuals: [f64; 3],
    /// Defining rows (top coefficient, `x^{2ik}` cancellation, `x^0`
    /// matching, `x^{1-2ik}` cancellation) at the closed forms.
    pub closed_form_row_residuals: [f64; 4],
    pub system: SolutionConstants,
    pub system_row_residuals: [f64; 4],
    pub used: ConstantsSource,
}

impl ConstantsResolution {
    pub fn constants(&self) -> SolutionConstants {
        match self.used {
            ConstantsSource::ClosedForm => self.closed_form,
            ConstantsSource::LinearSystem => self.system,
        }
    }
}

/// `Gamma(a)/Gamma(b)` through log-gamma.
fn gratio(a: Complex64, b: Complex64) -> Result<Complex64> {
    Ok((log_gamma(a)? - log_gamma(b)?).exp())
}

fn require_positive_k(function: &'static str, k: f64) -> Result<()> {
    if k > 0.0 {
        Ok(())
    } else {
        Err(domain(function, format!("requires k > 0, got {k}")))
    }
}

fn rel(terms: &[Complex64]) -> f64 {
    let sum: Complex64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.norm()).sum();
    if scale == 0.0 {
        0.0
    } else {
        sum.norm() / scale
    }
}

/// The closed-form gamma expressions as published.
pub fn constants_printed(params: OrderParams) -> Result<SolutionConstants> {
    require_positive_k("constants_printed", params.k)?;
    let (n, k) = (params.n as f64, params.k);
    let ik = I * k;
    let ch = (PI * k).cosh();
    let p2ik = Complex64::new(2.0, 0.0).powc(2.0 * ik);
    let g_mik = gam(-ik)?;
    let g_2ik = gam(2.0 * ik)?;
    let g_nmik = gam(-n - ik)?;
    let g_npik = gam(-n + ik)?;
    let g_half = gam(0.5 - ik)?;
    let c2 = 1.0 - ik * g_mik * g_mik / (p2ik * g_2ik * g_nmik * g_nmik);
    let c3 = -(2.0 / PI) * ch + 2.0 * ik * g_mik * g_mik * ch / (p2ik * PI * g_nmik * g_nmik)
        + g_mik * g_npik / (PI.sqrt() * g_2ik * g_half * g_nmik);
    let c4 = -g_mik * g_mik * g_npik / (2.0 * PI * p2ik * g_2ik * g_nmik * g_nmik);
    Ok(SolutionConstants { c2, c3, c4 })
}

/// Residuals of the three published linear relations.
pub fn printed_relations(params: OrderParams, c: &SolutionConstants) -> Result<[f64; 3]> {
    let (n, k) = (params.n as f64, params.k);
    let ik = I * k;
    let ch = (PI * k).cosh();
    let one = Complex64::new(1.0, 0.0);
    let r1 = rel(&[c.c2, -one, -c.c4 * PI * gratio(1.0 + 2.0 * ik, -n + ik)?]);
    let r2 = rel(&[c.c3, c.c2 * (2.0 / PI) * ch, c.c4 * gratio(-n - ik, -2.0 * ik)?]);
    let rhs = gam(-ik)? * gam(0.5 + ik)? * gratio(-n + ik, -n - ik)? / (PI.sqrt() * gam(2.0 * ik)?);
    let r3 = rel(&[2.0 * c.c2, c.c3 * PI / ch, -rhs]);
    Ok([r1, r2, r3])
}

/// Matrix and right-hand side of the defining system, plus the redundant
/// fourth row coefficient vector.
struct Rows {
    m: Matrix3<Complex64>,
    b: Vector3<Complex64>,
}

/// Rows from matching the two sides of `Lambda = c2 I W + c3 K W + c4 K M`:
/// the `x^n` growth (only `I W` grows, like `2^n x^n/sqrt(pi)`), the
/// cancellation of `x^{2ik}` (absent from a polynomial), and the `x^0`
/// coefficient, which must equal `a_1`.
fn rows(cv: &CoeffVector) -> Result<Rows> {
    let (n, k) = (cv.params.n as f64, cv.params.k);
    let ik = I * k;
    let ch = (PI * k).cosh();
    let z = Complex64::new(0.0, 0.0);
    let top = Complex64::new(2f64.powf(n) / PI.sqrt(), 0.0);
    // x^0 coefficient of I_{-1/2+ik}(x) W_{n+1/2,ik}(2x)
    let g = Complex64::new(2.0, 0.0).powc(1.0 - 2.0 * ik) * gratio(2.0 * ik, 0.5 + ik)? / gam(ik - n)?;
    let m = Matrix3::new(
        top,
        z,
        z,
        Complex64::new(2.0 / PI * ch, 0.0),
        Complex64::new(1.0, 0.0),
        gratio(-n - ik, -2.0 * ik)?,
        g,
        g * PI / (2.0 * ch),
        z,
    );
    let b = Vector3::new(cv.top(), z, cv.a(1));
    Ok(Rows { m, b })
}

fn row_residuals(r: &Rows, c: &SolutionConstants) -> [f64; 4] {
    let v = [c.c2, c.c3, c.c4];
    let mut out = [0.0; 4];
    for (i, o) in out.iter_mut().take(3).enumerate() {
        let mut terms: Vec<Complex64> = (0..3).map(|j| r.m[(i, j)] * v[j]).collect();
        terms.push(-r.b[i]);
        *o = rel(&terms);
    }
    // only K W carries x^{1-2ik}
    out[3] = c.c3.norm() / (c.c2.norm() + c.c3.norm() + c.c4.norm());
    out
}

/// Solve the defining 3x3 system.
pub fn constants_linear_system(cv: &CoeffVector) -> Result<SolutionConstants> {
    require_positive_k("constants_linear_system", cv.params.k)?;
    let r = rows(cv)?;
    let sol = r
        .m
        .lu()
        .solve(&r.b)
        .ok_or_else(|| Error::InvariantViolation(format!("{}: constants system is singular", cv.params)))?;
    Ok(SolutionConstants {
        c2: sol[0],
        c3: sol[1],
        c4: sol[2],
    })
}

/// Evaluate the published closed forms, test them against the defining
/// rows, and fall back to solving the system when they do not satisfy it.
pub fn constants_closed_form(cv: &CoeffVector) -> Result<ConstantsResolution> {
    let params = cv.params;
    let closed_form = constants_printed(params)?;
    let printed_relation_residuals = printed_relations(params, &closed_form)?;
    let r = rows(cv)?;
    let closed_form_row_residuals = row_residuals(&r, &closed_form);
    let system = constants_linear_system(cv)?;
    let system_row_residuals = row_residuals(&r, &system);
    let used = if closed_form_row_residuals.iter().all(|x| *x <= RELATION_TOL) {
        ConstantsSource::ClosedForm
    } else {
        log::info!("{params}: closed-form constants miss the defining relations; using the linear system");
        ConstantsSource::LinearSystem
    };
    Ok(ConstantsResolution {
        params,
        closed_form,
        printed_relation_residuals,
        closed_form_row_residuals,
        system,
        system_row_residuals,
        used,
    })
}

impl ConstantsResolution {
    /// Load-bearing: the constants in use satisfy the defining rows.
    pub fn relations_report(&self) -> ResidualReport {
        let res = match self.used {
            ConstantsSource::ClosedForm => self.closed_form_row_residuals,
            ConstantsSource::LinearSystem => self.system_row_residuals,
        };
        ResidualReport::new("constants_relations", self.params, vec![1.0, 2.0, 3.0, 4.0], res.to_vec(), RELATION_TOL)
    }

    /// Advisory: the published relations at the published closed forms.
    pub fn printed_relations_report(&self) -> ResidualReport {
        ResidualReport::new(
            "constants_printed_relations",
            self.params,
            vec![1.0, 2.0, 3.0],
            self.printed_relation_residuals.to_vec(),
            RELATION_TOL,
        )
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    let (lo, hi) = RECONSTRUCTION_X_RANGE;
    match grid.iter().find(|x| !(lo..=hi).contains(*x)) {
        Some(x) => Err(domain("lambda_reconstruction", format!("x = {x} outside [{lo}, {hi}]"))),
        None => Ok(()),
    }
}

/// `|got - want|` over `max(|want|, sum |terms|)`, so that zeros of the
/// polynomial do not blow up the relative error. Zero when everything vanishes.
fn deviation(want: Complex64, terms: &[Complex64]) -> f64 {
    let got: Complex64 = terms.iter().sum();
    let scale = want.norm().max(terms.iter().map(|t| t.norm()).sum());
    if scale == 0.0 {
        0.0
    } else {
        (got - want).norm() / scale
    }
}

/// The terms `c1 I M, c2 I W, c3 K W, c4 K M` at `x`.
pub fn basis_terms(
    params: OrderParams,
    c1: Complex64,
    c: &SolutionConstants,
    x: f64,
    cfg: &EvalConfig,
) -> Result<[Complex64; 4]> {
    let nu = Complex64::new(-0.5, params.k);
    let kappa = Complex64::new(params.kappa(), 0.0);
    let mu = Complex64::new(0.0, params.k);
    let i = bessel_i(nu, x, cfg)?;
    let k = bessel_k_via_w(nu, x, cfg)?;
    let m = whittaker_m(kappa, mu, 2.0 * x, cfg)?;
    let w = whittaker_w(kappa, mu, 2.0 * x, cfg)?;
    Ok([c1 * i * m, c.c2 * i * w, c.c3 * k * w, c.c4 * k * m])
}

/// Compare the basis combination with the polynomial, optionally with an
/// extra `c1 I M` component.
pub fn reconstruction_with(
    cv: &CoeffVector,
    c1: Complex64,
    c: &SolutionConstants,
    grid: &[f64],
    check: &str,
    cfg: &EvalConfig,
) -> Result<ResidualReport> {
    check_grid(grid)?;
    require_positive_k("lambda_reconstruction", cv.params.k)?;
    let lam = cv.big_lambda();
    let residuals = grid
        .iter()
        .map(|&x| {
            Ok(deviation(lam.eval_real(x), &basis_terms(cv.params, c1, c, x, cfg)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ResidualReport::new(check, cv.params, grid.to_vec(), residuals, RECONSTRUCTION_THRESHOLD))
}

/// `k = 0`: `I_{-1/2} W + c4 K_{1/2} M` with `c4 = (-1)^{n+1} n!/pi` must
/// equal `(-1)^n n!/sqrt(pi) L_n(2x)`.
fn reconstruction_k0(n: u32, grid: &[f64], cfg: &EvalConfig) -> Result<ResidualReport> {
    let params = OrderParams::new(n, 0.0)?;
    let lam = laguerre_closed_form(n)?.big_lambda();
    let fact: f64 = (1..=n).map(f64::from).product();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let c4 = -sign * fact / PI;
    let kappa = Complex64::new(params.kappa(), 0.0);
    let z = Complex64::new(0.0, 0.0);
    let residuals = grid
        .iter()
        .map(|&x| {
            let i = bessel_i(Complex64::new(-0.5, 0.0), x, cfg)?;
            let k = bessel_k_quad(Complex64::new(0.5, 0.0), x, cfg)?;
            let w = whittaker_w(kappa, z, 2.0 * x, cfg)?;
            let m = whittaker_m(kappa, z, 2.0 * x, cfg)?;
            Ok(deviation(lam.eval_real(x), &[i * w, c4 * k * m]))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ResidualReport::new("reconstruction", params, grid.to_vec(), residuals, RECONSTRUCTION_THRESHOLD))
}

/// Reconstruct `Lambda` from the product basis.
///
/// Returns the load-bearing report (constants in use, check `reconstruction`)
/// and, when the closed forms were rejected, an advisory report for them
/// (`reconstruction_closed_form`). At `k = 0` the Laguerre form is checked.
pub fn lambda_reconstruction(cv: &CoeffVector, grid: &[f64], cfg: &EvalConfig) -> Result<Vec<ResidualReport>> {
    check_grid(grid)?;
    if cfg.is_k_zero(cv.params.k) {
        return Ok(vec![reconstruction_k0(cv.params.n, grid, cfg)?]);
    }
    let res = constants_closed_form(cv)?;
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![reconstruction_with(cv, zero, &res.constants(), grid, "reconstruction", cfg)?];
    if res.used == ConstantsSource::LinearSystem {
        out.push(reconstruction_with(cv, zero, &res.closed_form, grid, "reconstruction_closed_form", cfg)?);
    }
    Ok(out)
}

/// Deviations of the system constants at `k = K_LIMIT_PROBE` from the
/// `k = 0` values `c2 = 1`, `c3 = 0`, `c4 = (-1)^{n+1} n!/pi` (relative for
/// `c4`). Passes when each is at most `K_LIMIT_SLOPE * k`.
pub fn k_limit_check(n: u32) -> Result<ResidualReport> {
    let k = K_LIMIT_PROBE;
    let params = OrderParams::new(n, k)?;
    let cv = crate::lambda::coeffs_from_recurrence(params)?;
    let c = constants_linear_system(&cv)?;
    let fact: f64 = (1..=n).map(f64::from).product();
    let c4_0 = if n % 2 == 0 { -fact / PI } else { fact / PI };
    let res = vec![(c.c2 - 1.0).norm(), c.c3.norm(), (c.c4 - c4_0).norm() / c4_0.abs()];
    Ok(ResidualReport::new("constants_k_limit", params, vec![2.0, 3.0, 4.0], res, K_LIMIT_SLOPE * k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::coeffs_from_recurrence;

    fn cv(n: u32, k: f64) -> CoeffVector {
        coeffs_from_recurrence(OrderParams::new(n, k).unwrap()).unwrap()
    }

    #[test]
    fn system_gives_expected_values() {
        for (n, k) in [(0, 1.0), (1, 1.0), (3, 0.5), (6, 2.0)] {
            let c = constants_linear_system(&cv(n, k)).unwrap();
            assert!((c.c2 - 1.0).norm() < 1e-12, "n={n} k={k} c2={}", c.c2);
            assert!(c.c3.norm() < 1e-9, "c3={}", c.c3);
            let want = -(2.0 / PI) * (PI * k).cosh() * gratio(-2.0 * I * k, -(n as f64) - I * k).unwrap();
            assert!((c.c4 - want).norm() < 1e-10 * want.norm());
        }
    }

    #[test]
    fn printed_relation_two_holds_for_the_system() {
        let v = cv(2, 0.5);
        let c = constants_linear_system(&v).unwrap();
        let r = printed_relations(v.params, &c).unwrap();
        assert!(r[1] < 1e-12);
    }

    #[test]
    fn reconstruction_passes_and_detects_perturbations() {
        let cfg = EvalConfig::default();
        let v = cv(1, 1.0);
        let reports = lambda_reconstruction(&v, &RECONSTRUCTION_GRID, &cfg).unwrap();
        assert!(reports[0].pass, "{:?}", reports[0].residuals);
        let c = constants_linear_system(&v).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        let bad = reconstruction_with(&v, zero, &c.scaled(1.0 + 1e-3), &RECONSTRUCTION_GRID, "r", &cfg).unwrap();
        assert!(!bad.pass);
        let c1 = reconstruction_with(&v, Complex64::new(1e-6, 0.0), &c, &RECONSTRUCTION_GRID, "r", &cfg).unwrap();
        assert!(!c1.pass);
        assert_eq!(c1.residuals.iter().cloned().fold(0.0, f64::max), c1.residuals[4]);
    }

    #[test]
    fn k_zero_bypass() {
        let cfg = EvalConfig::default();
        let v = laguerre_closed_form(3).unwrap();
        let r = lambda_reconstruction(&v, &[0.5, 1.0, 2.0], &cfg).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].pass, "{:?}", r[0].residuals);
    }

    #[test]
    fn small_k_limits() {
        for n in [0, 1, 4, 8] {
            let r = k_limit_check(n).unwrap();
            assert!(r.pass, "n={n}: {:?}", r.residuals);
        }
    }
}

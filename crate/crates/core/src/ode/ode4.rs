//! The fourth-order equation satisfied by `Lambda` alone, and checks of its
//! product-form solution basis.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::kernels::{bessel_i, bessel_i_tilde, bessel_k_via_w, whittaker_m, whittaker_w, EvalConfig, OrderParams};
use crate::numeric::{PolyC, I};
use crate::ode::fd::derivatives;
use crate::report::{Comparison, ResidualReport};

pub const BASIS_THRESHOLD: f64 = 1e-4;
pub const CONTROL_THRESHOLD: f64 = 1e-1;
pub const POLY_THRESHOLD: f64 = 1e-8;
pub const REALNESS_THRESHOLD: f64 = 1e-10;
pub const WHITTAKER_EQ_THRESHOLD: f64 = 1e-6;
pub const ODE4_X_RANGE: (f64, f64) = (0.5, 6.0);

/// Default grid for the product-basis checks.
pub const BASIS_GRID: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

/// `a1 f'''' + a2 f''' + a3 f'' + a4 f' + a5 f = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ode4Coeffs {
    pub a1: PolyC,
    pub a2: PolyC,
    pub a3: PolyC,
    pub a4: PolyC,
    pub a5: PolyC,
}

impl Ode4Coeffs {
    /// Coefficients ordered by the derivative they multiply, highest first.
    pub fn as_array(&self) -> [&PolyC; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a5]
    }

    /// Apply the operator to a polynomial exactly.
    pub fn apply_poly(&self, p: &PolyC) -> PolyC {
        self.as_array()
            .iter()
            .enumerate()
            .fold(PolyC::zero(), |acc, (i, a)| acc + *a * &p.nth_derivative(4 - i))
    }
}

fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn build(params: OrderParams, a3_const: Complex64) -> Ode4Coeffs {
    let n = params.n as f64;
    let k = params.k;
    let s = 1.0 + 2.0 * n;
    let nn = n * (n + 1.0);
    let one_m4ik = cr(1.0) - 4.0 * I * k;
    let p = |c: Vec<Complex64>| PolyC::new(c);
    Ode4Coeffs {
        a1: p(vec![cr(0.0), cr(0.0), one_m4ik, cr(4.0 * s)]),
        a2: p(vec![cr(0.0), 4.0 * one_m4ik, cr(12.0 * s)]),
        a3: p(vec![
            a3_const,
            cr(4.0 * (1.0 + 4.0 * k * k) * s),
            4.0 * (cr(1.0 + 8.0 * nn) + 4.0 * I * k),
            cr(-16.0 * s),
        ]),
        a4: p(vec![
            -4.0 * (I + k) * (I + 4.0 * k) * s,
            8.0 * (cr(-1.0 + 2.0 * nn) + 6.0 * I * k),
            cr(-32.0 * s),
        ]),
        a5: p(vec![12.0 * nn * one_m4ik, cr(16.0 * nn * s)]),
    }
}

/// Constant term of `a3` as printed: `2i(1-2k)(i+k)(i+4k)`.
pub fn a3_constant_printed(k: f64) -> Complex64 {
    2.0 * I * (1.0 - 2.0 * k) * (I + k) * (I + 4.0 * k)
}

/// Constant term of `a3` from eliminating `Lambda^*`: `2i(i-2k)(i+k)(i+4k)`.
pub fn a3_constant_corrected(k: f64) -> Complex64 {
    2.0 * I * (I - 2.0 * k) * (I + k) * (I + 4.0 * k)
}

/// The coefficient polynomials exactly as published.
pub fn ode4_coeffs_printed(params: OrderParams) -> Ode4Coeffs {
    build(params, a3_constant_printed(params.k))
}

/// The coefficient polynomials used for all load-bearing checks. Identical
/// to [`ode4_coeffs_printed`] except for the constant term of `a3`.
pub fn ode4_coeffs(params: OrderParams) -> Ode4Coeffs {
    build(params, a3_constant_corrected(params.k))
}

fn weighted_residual(c: &Ode4Coeffs, x: f64, d: &[Complex64; 5]) -> Complex64 {
    let terms: Vec<Complex64> = c
        .as_array()
        .iter()
        .enumerate()
        .map(|(i, a)| a.eval_real(x) * d[4 - i])
        .collect();
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    let sum: Complex64 = terms.iter().sum();
    if scale == 0.0 {
        sum
    } else {
        sum / scale
    }
}

/// Residual of the corrected equation for `f` at `x`, normalized by the
/// largest of the five terms.
pub fn ode4_residual<F>(f: &F, params: OrderParams, x: f64, cfg: &EvalConfig) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64> + ?Sized,
{
    ode4_residual_with(f, &ode4_coeffs(params), x, cfg)
}

/// [`ode4_residual`] for an arbitrary coefficient set.
///
/// Derivatives come from nine-point differences at `h = fd_step max(1, x)`.
/// The residual is recomputed at `h/2`; if both exceed `fd_instability_floor`
/// and differ by more than half, the differences are not trustworthy.
pub fn ode4_residual_with<F>(f: &F, coeffs: &Ode4Coeffs, x: f64, cfg: &EvalConfig) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64> + ?Sized,
{
    let (lo, hi) = ODE4_X_RANGE;
    if !(lo..=hi).contains(&x) {
        return Err(domain("ode4_residual", format!("x = {x} outside [{lo}, {hi}]")));
    }
    let h = cfg.fd_step * x.max(1.0);
    let coarse = weighted_residual(coeffs, x, &derivatives(f, x, h)?);
    let fine = weighted_residual(coeffs, x, &derivatives(f, x, 0.5 * h)?);
    let floor = cfg.fd_instability_floor;
    if coarse.norm() > floor && fine.norm() > floor && (coarse - fine).norm() > 0.5 * fine.norm() {
        return Err(Error::StepInstability {
            x,
            coarse: coarse.norm(),
            fine: fine.norm(),
        });
    }
    Ok(coarse)
}

/// Exact residual for a polynomial argument, normalized like [`ode4_residual`].
pub fn ode4_poly_residual(coeffs: &Ode4Coeffs, p: &PolyC, x: f64) -> f64 {
    let d = [0, 1, 2, 3, 4].map(|j| p.nth_derivative(j).eval_real(x));
    weighted_residual(coeffs, x, &d).norm()
}

/// `Lambda` itself solves the equation: exact polynomial residual at each grid point.
pub fn polynomial_solution_check(cv: &crate::lambda::CoeffVector, grid: &[f64]) -> ResidualReport {
    let coeffs = ode4_coeffs(cv.params);
    let lam = cv.big_lambda();
    let residuals = grid.iter().map(|&x| ode4_poly_residual(&coeffs, &lam, x)).collect();
    ResidualReport::new("ode4_polynomial", cv.params, grid.to_vec(), residuals, POLY_THRESHOLD)
}

/// Named factors of the product solutions.
struct Factors {
    nu: Complex64,
    kappa: Complex64,
    mu: Complex64,
}

impl Factors {
    fn new(params: OrderParams) -> Self {
        Factors {
            nu: Complex64::new(-0.5, params.k),
            kappa: cr(params.kappa()),
            mu: Complex64::new(0.0, params.k),
        }
    }
}

type Product<'a> = Box<dyn Fn(f64) -> Result<Complex64> + Sync + 'a>;

fn products<'a>(params: OrderParams, cfg: &'a EvalConfig) -> Vec<(&'static str, Product<'a>)> {
    let Factors { nu, kappa, mu } = Factors::new(params);
    let i = move |x: f64| bessel_i(nu, x, cfg);
    let k = move |x: f64| bessel_k_via_w(nu, x, cfg);
    let it = move |x: f64| bessel_i_tilde(nu, x, cfg);
    let m = move |x: f64| whittaker_m(kappa, mu, 2.0 * x, cfg);
    let w = move |x: f64| whittaker_w(kappa, mu, 2.0 * x, cfg);
    vec![
        ("ode4_basis_im", Box::new(move |x| Ok(i(x)? * m(x)?))),
        ("ode4_basis_iw", Box::new(move |x| Ok(i(x)? * w(x)?))),
        ("ode4_basis_kw", Box::new(move |x| Ok(k(x)? * w(x)?))),
        ("ode4_basis_km", Box::new(move |x| Ok(k(x)? * m(x)?))),
        ("ode4_basis_itilde_m", Box::new(move |x| Ok(it(x)? * m(x)?))),
    ]
}

/// Evaluate one function on the grid, turning step instability into an
/// infinite residual rather than aborting.
fn residuals_on<F>(f: &F, coeffs: &Ode4Coeffs, grid: &[f64], cfg: &EvalConfig) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Complex64> + ?Sized,
{
    grid.iter()
        .map(|&x| match ode4_residual_with(f, coeffs, x, cfg) {
            Ok(r) => Ok(r.norm()),
            Err(Error::StepInstability { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        })
        .collect()
}

fn require_positive_k(function: &'static str, params: OrderParams) -> Result<()> {
    if params.k > 0.0 {
        Ok(())
    } else {
        Err(domain(function, format!("requires k > 0, got {}", params.k)))
    }
}

/// Residuals of the four basis products `I M, I W, K W, K M` (orders
/// `-1/2+ik` and `(n+1/2, ik)`), of `I~ M`, and of a control `K M_{n+3/2,ik}`
/// that must be rejected.
pub fn product_solution_check(params: OrderParams, grid: &[f64], cfg: &EvalConfig) -> Result<Vec<ResidualReport>> {
    require_positive_k("product_solution_check", params)?;
    let coeffs = ode4_coeffs(params);
    let mut out = Vec::new();
    for (name, f) in products(params, cfg) {
        let res = residuals_on(&*f, &coeffs, grid, cfg)?;
        out.push(ResidualReport::new(name, params, grid.to_vec(), res, BASIS_THRESHOLD));
    }
    let Factors { nu, kappa, mu } = Factors::new(params);
    let control = |x: f64| Ok(bessel_k_via_w(nu, x, cfg)? * whittaker_m(kappa + 1.0, mu, 2.0 * x, cfg)?);
    let res = residuals_on(&control, &coeffs, grid, cfg)?;
    out.push(ResidualReport::with_comparison(
        "ode4_control",
        params,
        grid.to_vec(),
        res,
        CONTROL_THRESHOLD,
        Comparison::AtLeast,
    ));
    Ok(out)
}

/// Same products against the coefficients as published (advisory).
pub fn product_solution_check_printed(
    params: OrderParams,
    grid: &[f64],
    cfg: &EvalConfig,
) -> Result<Vec<ResidualReport>> {
    require_positive_k("product_solution_check_printed", params)?;
    let coeffs = ode4_coeffs_printed(params);
    let mut out = Vec::new();
    for (name, f) in products(params, cfg).into_iter().take(4) {
        let res = residuals_on(&*f, &coeffs, grid, cfg)?;
        out.push(ResidualReport::new(
            format!("{name}_printed"),
            params,
            grid.to_vec(),
            res,
            BASIS_THRESHOLD,
        ));
    }
    Ok(out)
}

/// Whittaker operator for `y(x) = w(2x)` with `kappa = n+1/2`, `mu = ik`:
/// `y'' + (-1 + (2n+1)/x + (1/4 + k^2)/x^2) y`, normalized by the larger term.
fn whittaker_eq_residual<F>(f: &F, params: OrderParams, x: f64, cfg: &EvalConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let q = -1.0 + (2.0 * params.n as f64 + 1.0) / x + (0.25 + params.k * params.k) / (x * x);
    let d = derivatives(f, x, cfg.fd_step * x.max(1.0))?;
    let (a, b) = (d[2], d[0] * q);
    Ok((a + b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE))
}

/// Conditions on the trial functions `F = i W` and `G = M_+ + M_-`:
/// `W` and `G` are real, `M_+ - M_-` is imaginary, and `W`, `G`, `M_+ - M_-`
/// each solve the Whittaker equation.
pub fn trial_condition_check(params: OrderParams, grid: &[f64], cfg: &EvalConfig) -> Result<Vec<ResidualReport>> {
    require_positive_k("trial_condition_check", params)?;
    let Factors { kappa, mu, .. } = Factors::new(params);
    let w = |x: f64| whittaker_w(kappa, mu, 2.0 * x, cfg);
    let g = |x: f64| Ok(whittaker_m(kappa, mu, 2.0 * x, cfg)? + whittaker_m(kappa, -mu, 2.0 * x, cfg)?);
    let d = |x: f64| Ok(whittaker_m(kappa, mu, 2.0 * x, cfg)? - whittaker_m(kappa, -mu, 2.0 * x, cfg)?);

    let mut real = Vec::with_capacity(grid.len());
    let mut eq = Vec::with_capacity(grid.len());
    for &x in grid {
        let (wv, gv, dv) = (w(x)?, g(x)?, d(x)?);
        real.push(
            (wv.im.abs() / wv.norm())
                .max(gv.im.abs() / gv.norm())
                .max(dv.re.abs() / dv.norm()),
        );
        let e = whittaker_eq_residual(&w, params, x, cfg)?
            .max(whittaker_eq_residual(&g, params, x, cfg)?)
            .max(whittaker_eq_residual(&d, params, x, cfg)?);
        eq.push(e);
    }
    Ok(vec![
        ResidualReport::new("trial_realness", params, grid.to_vec(), real, REALNESS_THRESHOLD),
        ResidualReport::new("trial_whittaker_eq", params, grid.to_vec(), eq, WHITTAKER_EQ_THRESHOLD),
    ])
}

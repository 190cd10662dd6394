//! Recover the coefficients by least-squares fitting the product identity at
//! sample points. Uses only the `W` and `K` kernels, never the recurrence.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{bessel_k_via_w_dd, whittaker_w_dd, EvalConfig, OrderParams};
use crate::numeric::dd::Dd;
use crate::lambda::coeffs::{CoeffVector, Convention, N_MAX};

pub const CONDITION_LIMIT: f64 = 1e10;
pub const FIT_RESIDUAL_LIMIT: f64 = 1e-8;
pub const GRID_LO: f64 = 0.25;
pub const GRID_HI: f64 = 6.0;

/// `4(n+1)` Chebyshev points on `[0.25, 6]`.
pub fn collocation_grid(n: u32) -> Vec<f64> {
    let count = 4 * (n as usize + 1);
    let (mid, half) = (0.5 * (GRID_LO + GRID_HI), 0.5 * (GRID_HI - GRID_LO));
    let mut xs: Vec<f64> = (0..count)
        .map(|j| mid + half * (std::f64::consts::PI * (j as f64 + 0.5) / count as f64).cos())
        .collect();
    xs.sort_by(f64::total_cmp);
    xs
}

fn check_grid(n: u32, xs: &[f64]) -> Result<()> {
    let need = 2 * (n as usize + 1);
    if xs.len() < need {
        return Err(crate::error::domain(
            "collocation_oracle",
            format!("need at least {need} points, got {}", xs.len()),
        ));
    }
    if let Some(x) = xs.iter().find(|x| !(GRID_LO..=GRID_HI).contains(*x)) {
        return Err(crate::error::domain(
            "collocation_oracle",
            format!("point {x} outside [{GRID_LO}, {GRID_HI}]"),
        ));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(crate::error::domain("collocation_oracle", "points must be distinct"));
    }
    Ok(())
}

/// Householder least squares in double-double. `a` is row-major `rows x cols`.
fn lstsq_dd(a: &[Vec<Dd>], b: &[Dd]) -> Option<Vec<Dd>> {
    let (rows, cols) = (a.len(), a[0].len());
    // augmented copy [A | b]
    let mut m: Vec<Vec<Dd>> = a.iter().zip(b).map(|(r, bi)| r.iter().copied().chain([*bi]).collect()).collect();
    for j in 0..cols {
        let norm = (j..rows).fold(Dd::ZERO, |acc, i| acc + m[i][j].sqr()).sqrt();
        if norm.is_zero() {
            return None;
        }
        let alpha = if m[j][j].to_f64() > 0.0 { -norm } else { norm };
        let mut v: Vec<Dd> = (j..rows).map(|i| m[i][j]).collect();
        v[0] = v[0] - alpha;
        let vv = v.iter().fold(Dd::ZERO, |acc, x| acc + x.sqr());
        for c in j..=cols {
            let s = v.iter().enumerate().fold(Dd::ZERO, |acc, (i, vi)| acc + *vi * m[j + i][c]);
            let f = (s * 2.0) / vv;
            for (i, vi) in v.iter().enumerate() {
                m[j + i][c] = m[j + i][c] - f * *vi;
            }
        }
    }
    let mut x = vec![Dd::ZERO; cols];
    for j in (0..cols).rev() {
        let s = (j + 1..cols).fold(m[j][cols], |acc, c| acc - m[j][c] * x[c]);
        x[j] = s / m[j][j];
    }
    Some(x)
}

/// Fits `W_{n+1/2,ik}(2x) = sum_m x^m (a_m K_{1/2+ik}(x) + a_m^* K_{1/2-ik}(x))`.
///
/// With `a_m = u_m + i v_m` each row is real-linear in `(u, v)`:
/// `x^m [u_m (K_+ + K_-) + v_m i(K_+ - K_-)]`. Both sides are real for real
/// `x`, so only the real part of each equation is used.
///
/// The design is badly conditioned by nature (only `Re(lambda K_+)` is
/// observed and the phase of `K_+` varies slowly), so the data and the solve
/// are carried in double-double. Rows and columns are equilibrated; the
/// condition number refers to the scaled matrix.
pub fn collocation_oracle(params: OrderParams, xs: &[f64], cfg: &EvalConfig) -> Result<CoeffVector> {
    collocation_oracle_with_limit(params, xs, cfg, CONDITION_LIMIT)
}

/// [`collocation_oracle`] with a caller-chosen condition-number guard, for
/// diagnosing how far the fit remains usable past the default limit.
pub fn collocation_oracle_with_limit(
    params: OrderParams,
    xs: &[f64],
    cfg: &EvalConfig,
    cond_limit: f64,
) -> Result<CoeffVector> {
    if cfg.is_k_zero(params.k) {
        return Err(crate::error::domain(
            "collocation_oracle",
            "k = 0 is handled by the Laguerre closed form",
        ));
    }
    if params.n > N_MAX {
        return Err(crate::error::domain("collocation_oracle", format!("n = {} exceeds {N_MAX}", params.n)));
    }
    check_grid(params.n, xs)?;
    let terms = params.n as usize + 1;
    let kappa = Complex64::new(params.kappa(), 0.0);
    let mu = Complex64::new(0.0, params.k);
    // the solve amplifies data error by the condition number, so the kernels
    // are summed to double-double accuracy here
    let data_cfg = EvalConfig {
        series_rel_tol: cfg.series_rel_tol.min(cfg.extended_rel_tol),
        ..cfg.clone()
    };
    let cfg = &data_cfg;
    let nu = Complex64::new(0.5, params.k);

    let mut a = vec![vec![Dd::ZERO; 2 * terms]; xs.len()];
    let mut b = vec![Dd::ZERO; xs.len()];
    for (row, &x) in xs.iter().enumerate() {
        let kp = bessel_k_via_w_dd(nu, x, cfg)?;
        let km = bessel_k_via_w_dd(nu.conj(), x, cfg)?;
        let sym = (kp + km).re;
        let anti = -(kp - km).im;
        let xd = Dd::from_f64(x);
        let mut xm = Dd::ONE;
        for m in 0..terms {
            xm = xm * xd;
            a[row][2 * m] = xm * sym;
            a[row][2 * m + 1] = xm * anti;
        }
        b[row] = whittaker_w_dd(kappa, mu, 2.0 * x, cfg)?.re;
        let s = a[row].iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
        if s > 0.0 {
            for v in a[row].iter_mut() {
                *v = *v / s;
            }
            b[row] = b[row] / s;
        }
    }
    let mut scales = vec![0.0; 2 * terms];
    for (j, sc) in scales.iter_mut().enumerate() {
        *sc = a.iter().map(|r| r[j].to_f64().powi(2)).sum::<f64>().sqrt();
        if *sc == 0.0 {
            return Err(Error::IllConditioned {
                cond: f64::INFINITY,
                limit: cond_limit,
            });
        }
        for r in a.iter_mut() {
            r[j] = r[j] / *sc;
        }
    }

    let approx = DMatrix::from_fn(xs.len(), 2 * terms, |i, j| a[i][j].to_f64());
    let sv = approx.singular_values();
    let cond = sv.max() / sv.min();
    if !(cond <= cond_limit) {
        return Err(Error::IllConditioned {
            cond,
            limit: cond_limit,
        });
    }
    let y = lstsq_dd(&a, &b)
        .ok_or_else(|| Error::InvariantViolation("least-squares system is singular".into()))?;
    let mut res2 = Dd::ZERO;
    let mut b2 = Dd::ZERO;
    for (row, bi) in a.iter().zip(&b) {
        let fit = row.iter().zip(&y).fold(Dd::ZERO, |acc, (aij, yj)| acc + *aij * *yj);
        res2 += (fit - *bi).sqr();
        b2 += bi.sqr();
    }
    let fit_residual = (res2 / b2).sqrt().to_f64();
    if !(fit_residual <= FIT_RESIDUAL_LIMIT) {
        return Err(Error::InvariantViolation(format!(
            "{params}: collocation residual {fit_residual:.3e} exceeds {FIT_RESIDUAL_LIMIT:.0e}"
        )));
    }
    let coeffs = (0..terms)
        .map(|m| Complex64::new((y[2 * m] / scales[2 * m]).to_f64(), (y[2 * m + 1] / scales[2 * m + 1]).to_f64()))
        .collect();
    Ok(CoeffVector::from_parts(params, Convention::RESOLVED, coeffs))
}

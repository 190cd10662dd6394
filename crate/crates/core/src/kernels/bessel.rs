//! Modified Bessel functions of complex order and real positive argument.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::hypergeometric::{sum_series, whittaker_w_dd};
use crate::kernels::EvalConfig;
use crate::numeric::dd::{ln_gamma_dd, CDd, Dd, DD_PI};

fn check_positive(function: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(crate::error::domain(function, format!("argument must be positive, got {x}")))
    }
}

pub(crate) fn bessel_i_dd(nu: Complex64, x: f64, cfg: &EvalConfig) -> Result<CDd> {
    // I_{-N} = I_N for integer N
    let nu = if nu.im == 0.0 && nu.re < 0.0 && nu.re.fract() == 0.0 {
        -nu
    } else {
        nu
    };
    let nud: CDd = nu.into();
    let half_x = Dd::from_f64(x).ldexp(-1);
    let lg = ln_gamma_dd(nud + 1.0).expect("nu + 1 is not a pole after the sign flip");
    let first = (nud * CDd::from_re(half_x.ln()) - lg).exp();
    let q = half_x.sqr();
    sum_series(first, cfg.series_rel_tol, cfg, "bessel_i", |m| {
        let m1 = m as f64 + 1.0;
        (nud + m1).scale(Dd::from_f64(m1)).recip().scale(q)
    })
}

/// `I_nu(x) = sum (x/2)^{nu+2m} / (m! Gamma(nu+m+1))`.
pub fn bessel_i(nu: Complex64, x: f64, cfg: &EvalConfig) -> Result<Complex64> {
    check_positive("bessel_i", x)?;
    Ok(bessel_i_dd(nu, x, cfg)?.to_c64())
}

/// `I_nu(x) + I_{-nu}(x)`.
pub fn bessel_i_tilde(nu: Complex64, x: f64, cfg: &EvalConfig) -> Result<Complex64> {
    check_positive("bessel_i_tilde", x)?;
    Ok((bessel_i_dd(nu, x, cfg)? + bessel_i_dd(-nu, x, cfg)?).to_c64())
}

pub(crate) fn bessel_k_via_w_dd(nu: Complex64, x: f64, cfg: &EvalConfig) -> Result<CDd> {
    let w = whittaker_w_dd(Complex64::new(0.0, 0.0), nu, 2.0 * x, cfg)?;
    let pref = (DD_PI / (Dd::from_f64(x) * 2.0)).sqrt();
    Ok(w.scale(pref))
}

/// `K_nu(x) = sqrt(pi/(2x)) W_{0,nu}(2x)`.
///
/// Inherits the restrictions of [`whittaker_w`](crate::kernels::whittaker_w):
/// integer `2 nu` is refused, so `K_{1/2}` must go through [`bessel_k_quad`].
pub fn bessel_k_via_w(nu: Complex64, x: f64, cfg: &EvalConfig) -> Result<Complex64> {
    check_positive("bessel_k_via_w", x)?;
    Ok(bessel_k_via_w_dd(nu, x, cfg)?.to_c64())
}

fn auto_cutoff(nu_re: f64, x: f64, decay: f64) -> f64 {
    let mut t = 1.0f64;
    while x * t.cosh() - nu_re.abs() * t <= decay {
        t += 0.125;
    }
    t
}

/// `K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t) dt` by the trapezoid rule,
/// halving the step until two successive sums agree to `quad_rel_tol`.
///
/// The integrand is analytic and doubly-exponentially decaying, so the
/// trapezoid rule converges geometrically; a couple of halvings suffice.
pub fn bessel_k_quad(nu: Complex64, x: f64, cfg: &EvalConfig) -> Result<Complex64> {
    check_positive("bessel_k_quad", x)?;
    if nu.re.abs() >= 1.0 || !nu.im.is_finite() {
        return Err(crate::error::domain(
            "bessel_k_quad",
            format!("requires |Re nu| < 1, got nu = {nu}"),
        ));
    }
    let cutoff = cfg
        .quad_cutoff
        .unwrap_or_else(|| auto_cutoff(nu.re, x, cfg.quad_decay));
    let f = |t: f64| -> CDd {
        let env = (-x * t.cosh()).exp();
        let (a, b) = (nu.re * t, nu.im * t);
        Complex64::new(a.cosh() * b.cos() * env, a.sinh() * b.sin() * env).into()
    };

    let mut h = cfg.quad_step;
    let mut steps = (cutoff / h).ceil() as usize;
    let mut sum = f(0.0) * 0.5;
    for j in 1..=steps {
        sum += f(j as f64 * h);
    }
    let mut prev = (sum * h).to_c64();
    for _ in 0..cfg.quad_max_halvings {
        // only the new midpoints need evaluating
        for j in 0..steps {
            sum += f((j as f64 + 0.5) * h);
        }
        h *= 0.5;
        steps *= 2;
        let cur = (sum * h).to_c64();
        if (cur - prev).norm() <= cfg.quad_rel_tol * cur.norm() {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNonConvergence {
        levels: cfg.quad_max_halvings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c;
    use std::f64::consts::PI;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn half_order_closed_forms() {
        for x in [0.25, 1.0, 3.0, 8.0] {
            let k = bessel_k_quad(c(0.5, 0.0), x, &cfg()).unwrap();
            let want = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!((k.re - want).abs() < 1e-13 * want, "x={x}: {k} vs {want}");
            let i = bessel_i(c(-0.5, 0.0), x, &cfg()).unwrap();
            let want = (2.0 / (PI * x)).sqrt() * x.cosh();
            assert!((i.re - want).abs() < 1e-14 * want);
        }
    }

    #[test]
    fn integer_order_symmetry() {
        let a = bessel_i(c(-2.0, 0.0), 1.3, &cfg()).unwrap();
        let b = bessel_i(c(2.0, 0.0), 1.3, &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn k_two_ways_agree() {
        for k in [0.3, 1.0, 2.5] {
            let nu = c(0.5, k);
            for x in [0.25, 1.0, 4.0, 8.0] {
                let a = bessel_k_via_w(nu, x, &cfg()).unwrap();
                let b = bessel_k_quad(nu, x, &cfg()).unwrap();
                assert!((a - b).norm() <= 1e-11 * b.norm(), "k={k} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn k_from_i_via_reflection() {
        // K_nu = pi/2 (I_{-nu} - I_nu) / sin(nu pi)
        let nu = c(0.5, 0.7);
        let x = 1.7;
        let k = bessel_k_quad(nu, x, &cfg()).unwrap();
        let diff = bessel_i(-nu, x, &cfg()).unwrap() - bessel_i(nu, x, &cfg()).unwrap();
        let alt = diff * (PI / 2.0) / (nu * PI).sin();
        assert!((k - alt).norm() < 1e-12 * k.norm());
    }

    #[test]
    fn quad_domain_and_budget() {
        assert!(bessel_k_quad(c(1.5, 0.0), 1.0, &cfg()).is_err());
        assert!(bessel_k_quad(c(0.5, 0.0), 0.0, &cfg()).is_err());
        let tight = EvalConfig {
            quad_step: 2.0,
            quad_max_halvings: 1,
            ..cfg()
        };
        assert!(matches!(
            bessel_k_quad(c(0.5, 3.0), 0.5, &tight),
            Err(Error::QuadratureNonConvergence { .. })
        ));
    }
}

//! Kummer's `M(a, b, z)` and the Whittaker functions built on it.
//!
//! Everything below runs in double-double and rounds once at the end.

use log::warn;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::EvalConfig;
use crate::numeric::dd::{gamma_ratio_dd, CDd, Dd};
use crate::numeric::laguerre;

pub(crate) fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// Smallest truncation tolerance worth requesting from a double-double sum.
const DD_TOL_FLOOR: f64 = 1e-32;

/// Sums a series whose term ratio is supplied by `ratio(m)` (term_{m+1} /
/// term_m), stopping after three consecutive terms below `tol * |partial sum|`.
pub(crate) fn sum_series(
    first: CDd,
    tol: f64,
    cfg: &EvalConfig,
    function: &'static str,
    mut ratio: impl FnMut(usize) -> CDd,
) -> Result<CDd> {
    let mut term = first;
    let mut sum = first;
    let mut small_run = 0;
    for m in 0..cfg.series_max_terms {
        term *= ratio(m);
        sum += term;
        if term.abs_f64() <= tol * sum.abs_f64() {
            small_run += 1;
            if small_run == 3 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergence {
        function,
        max_terms: cfg.series_max_terms,
    })
}

pub(crate) fn kummer_m_dd(a: CDd, b: CDd, z: CDd, tol: f64, cfg: &EvalConfig) -> Result<CDd> {
    if is_nonpositive_integer(b.to_c64()) {
        return Err(Error::ParameterPole {
            function: "kummer_m",
            value: b.to_c64(),
        });
    }
    sum_series(CDd::ONE, tol, cfg, "kummer_m", |m| {
        let mf = m as f64;
        (a + mf) * z / ((b + mf) * (mf + 1.0))
    })
}

/// Kummer's confluent hypergeometric function `M(a, b, z) = sum (a)_m/(b)_m z^m/m!`.
pub fn kummer_m(a: Complex64, b: Complex64, z: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    Ok(kummer_m_dd(a.into(), b.into(), z.into(), cfg.series_rel_tol, cfg)?.to_c64())
}

fn check_positive(function: &'static str, z: f64) -> Result<()> {
    if z > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(crate::error::domain(function, format!("argument must be positive, got {z}")))
    }
}

pub(crate) fn whittaker_m_dd(kappa: CDd, mu: CDd, z: Dd, tol: f64, cfg: &EvalConfig) -> Result<CDd> {
    let b = mu * 2.0 + 1.0;
    if is_nonpositive_integer(b.to_c64()) {
        return Err(Error::ParameterPole {
            function: "whittaker_m",
            value: b.to_c64(),
        });
    }
    let a = mu + 0.5 - kappa;
    let series = kummer_m_dd(a, b, CDd::from_re(z), tol, cfg)?;
    let log_prefactor = (mu + 0.5) * CDd::from_re(z.ln()) - CDd::from_re(z.ldexp(-1));
    Ok(log_prefactor.exp() * series)
}

/// `M_{kappa,mu}(z) = e^{-z/2} z^{1/2+mu} M(1/2+mu-kappa, 1+2mu, z)` for real `z > 0`.
pub fn whittaker_m(kappa: Complex64, mu: Complex64, z: f64, cfg: &EvalConfig) -> Result<Complex64> {
    check_positive("whittaker_m", z)?;
    Ok(whittaker_m_dd(kappa.into(), mu.into(), Dd::from_f64(z), cfg.series_rel_tol, cfg)?.to_c64())
}

/// `n` when `kappa = n + 1/2` exactly.
fn half_integer_index(kappa: Complex64) -> Option<u32> {
    let n = kappa.re - 0.5;
    (kappa.im == 0.0 && n >= 0.0 && n.fract() == 0.0 && n < u32::MAX as f64).then_some(n as u32)
}

fn laguerre_branch(n: u32, z: f64) -> Complex64 {
    let fact: f64 = (1..=n).map(|j| j as f64).product();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Complex64::new(sign * fact * z.sqrt() * (-0.5 * z).exp() * laguerre(n, z), 0.0)
}

pub(crate) fn whittaker_w_dd(kappa: Complex64, mu: Complex64, z: f64, cfg: &EvalConfig) -> Result<CDd> {
    let two_mu = mu * 2.0;
    if mu == Complex64::new(0.0, 0.0) {
        return match half_integer_index(kappa) {
            Some(n) => Ok(laguerre_branch(n, z).into()),
            None => Err(Error::DegenerateParameter {
                function: "whittaker_w",
                two_mu,
            }),
        };
    }
    let dist = (two_mu - Complex64::new(two_mu.re.round(), 0.0)).norm();
    if dist == 0.0 {
        return Err(Error::DegenerateParameter {
            function: "whittaker_w",
            two_mu,
        });
    }
    if dist < cfg.near_degenerate_tol {
        warn!("whittaker_w: 2mu = {two_mu} is within {dist:.1e} of an integer; connection formula loses accuracy");
    }
    let (kd, md): (CDd, CDd) = (kappa.into(), mu.into());
    let zd = Dd::from_f64(z);
    let half = CDd::from_re(0.5);
    let pole = || Error::DegenerateParameter {
        function: "whittaker_w",
        two_mu,
    };
    let c_plus = gamma_ratio_dd(-md * 2.0, half - md - kd).ok_or_else(pole)?;
    let c_minus = gamma_ratio_dd(md * 2.0, half + md - kd).ok_or_else(pole)?;
    let combine = |tol: f64| -> Result<(CDd, f64)> {
        let mut out = CDd::ZERO;
        let mut gross = 0.0;
        for (coef, m) in [(c_plus, md), (c_minus, -md)] {
            if !coef.is_zero() {
                let t = coef * whittaker_m_dd(kd, m, zd, tol, cfg)?;
                gross += t.abs_f64();
                out += t;
            }
        }
        Ok((out, gross))
    };
    // The two terms cancel for large z. Truncation error is relative to the
    // terms, so tighten the series tolerance by the observed amplification.
    let (out, gross) = combine(cfg.series_rel_tol)?;
    let amplification = gross / out.abs_f64();
    if !(amplification > 1.0) {
        return Ok(out);
    }
    let tol = (cfg.series_rel_tol / amplification).max(DD_TOL_FLOOR);
    Ok(combine(tol)?.0)
}

/// Whittaker `W_{kappa,mu}(z)` for real `z > 0`.
///
/// Generic parameters use the connection formula
/// `W = Gamma(-2mu)/Gamma(1/2-mu-kappa) M_{kappa,mu} + Gamma(2mu)/Gamma(1/2+mu-kappa) M_{kappa,-mu}`.
/// `mu = 0` is accepted only for `kappa = n + 1/2`, where
/// `W = (-1)^n n! z^{1/2} e^{-z/2} L_n(z)`. Any other integer `2mu` is refused.
pub fn whittaker_w(kappa: Complex64, mu: Complex64, z: f64, cfg: &EvalConfig) -> Result<Complex64> {
    check_positive("whittaker_w", z)?;
    Ok(whittaker_w_dd(kappa, mu, z, cfg)?.to_c64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn kummer_trivial_cases() {
        let z0 = kummer_m(c(0.3, 1.0), c(2.0, -1.0), c(0.0, 0.0), &cfg()).unwrap();
        assert_eq!(z0, c(1.0, 0.0));
        let a0 = kummer_m(c(0.0, 0.0), c(1.5, 0.5), c(3.0, 0.0), &cfg()).unwrap();
        assert_eq!(a0, c(1.0, 0.0));
        let a = c(0.7, -2.0);
        let e = kummer_m(a, a, c(2.5, 0.0), &cfg()).unwrap();
        assert!((e - c(2.5f64.exp(), 0.0)).norm() < 1e-15 * 2.5f64.exp());
    }

    #[test]
    fn kummer_rejects_pole_and_short_budget() {
        assert!(matches!(
            kummer_m(c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0), &cfg()),
            Err(Error::ParameterPole { .. })
        ));
        let tight = EvalConfig {
            series_max_terms: 5,
            ..cfg()
        };
        assert!(matches!(
            kummer_m(c(0.5, 1.0), c(2.0, 1.0), c(10.0, 0.0), &tight),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn whittaker_m_laguerre_closed_form() {
        for n in 0..=5u32 {
            for x in [0.3, 1.0, 2.5] {
                let z = 2.0 * x;
                let m = whittaker_m(c(n as f64 + 0.5, 0.0), c(0.0, 0.0), z, &cfg()).unwrap();
                let want = z.sqrt() * (-x).exp() * laguerre(n, z);
                assert!((m.re - want).abs() <= 1e-14 * want.abs().max(1e-3), "n={n} x={x}");
                assert_eq!(m.im, 0.0);
            }
        }
    }

    #[test]
    fn whittaker_w_n0_closed_form() {
        for x in [0.25, 1.0, 4.0] {
            let w = whittaker_w(c(0.5, 0.0), c(0.0, 0.0), 2.0 * x, &cfg()).unwrap();
            let want = (2.0 * x).sqrt() * (-x).exp();
            assert!((w.re - want).abs() < 1e-15 * want);
        }
    }

    #[test]
    fn whittaker_w_degenerate_orders() {
        for mu in [c(0.5, 0.0), c(1.0, 0.0), c(-1.5, 0.0)] {
            assert!(matches!(
                whittaker_w(c(1.0, 0.0), mu, 2.0, &cfg()),
                Err(Error::DegenerateParameter { .. })
            ));
        }
        // mu = 0 with kappa not of the form n + 1/2
        assert!(whittaker_w(c(0.3, 0.0), c(0.0, 0.0), 2.0, &cfg()).is_err());
        assert!(whittaker_w(c(1.5, 0.0), c(0.0, 0.5), -1.0, &cfg()).is_err());
    }

    #[test]
    fn whittaker_w_is_real_for_imaginary_order() {
        for n in 0..4 {
            for k in [0.1, 1.0, 2.0] {
                for x in [0.25, 2.0, 8.0] {
                    let w = whittaker_w(c(n as f64 + 0.5, 0.0), c(0.0, k), 2.0 * x, &cfg()).unwrap();
                    assert!(w.im.abs() <= 1e-10 * w.norm(), "n={n} k={k} x={x}: {w}");
                }
            }
        }
    }
}

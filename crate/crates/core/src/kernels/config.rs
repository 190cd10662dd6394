use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and truncation limits for every numerical kernel.
///
/// Operations never hard-code a tolerance; they read it from here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Series stop after three consecutive terms below this fraction of the
    /// partial sum.
    pub series_rel_tol: f64,
    /// Series tolerance for data that feeds double-double solves (collocation).
    pub extended_rel_tol: f64,
    pub series_max_terms: usize,
    /// Initial trapezoid step for the `K` integral.
    pub quad_step: f64,
    /// Upper integration limit; `None` picks it from the decay bound.
    pub quad_cutoff: Option<f64>,
    /// The automatic cutoff `T` satisfies `x cosh T - |Re nu| T > quad_decay`.
    pub quad_decay: f64,
    pub quad_rel_tol: f64,
    pub quad_max_halvings: u32,
    /// Finite-difference step, scaled by `max(1, x)`.
    pub fd_step: f64,
    /// Residuals below this are treated as converged when judging the
    /// step-halving stability of a finite-difference residual.
    pub fd_instability_floor: f64,
    /// `|k|` at or below this is treated as `k = 0` (closed Laguerre forms).
    /// The default only catches an exact zero.
    pub k_zero_threshold: f64,
    /// Smallest `k > 0` accepted by identity verification in double precision.
    pub min_k_double: f64,
    /// Distance of `2 mu` from an integer below which a warning is logged.
    pub near_degenerate_tol: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            series_rel_tol: 1e-16,
            extended_rel_tol: 1e-30,
            series_max_terms: 1000,
            quad_step: 1.0 / 64.0,
            quad_cutoff: None,
            quad_decay: 45.0,
            quad_rel_tol: 1e-12,
            quad_max_halvings: 12,
            fd_step: 1e-2,
            fd_instability_floor: 1e-6,
            k_zero_threshold: 0.0,
            min_k_double: 1e-3,
            near_degenerate_tol: 1e-6,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("series_rel_tol", self.series_rel_tol),
            ("extended_rel_tol", self.extended_rel_tol),
            ("quad_step", self.quad_step),
            ("quad_decay", self.quad_decay),
            ("quad_rel_tol", self.quad_rel_tol),
            ("fd_step", self.fd_step),
            ("fd_instability_floor", self.fd_instability_floor),
            ("min_k_double", self.min_k_double),
            ("near_degenerate_tol", self.near_degenerate_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.k_zero_threshold >= 0.0) {
            return Err(Error::Config("k_zero_threshold must be nonnegative".into()));
        }
        if let Some(t) = self.quad_cutoff {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("quad_cutoff must be positive, got {t}")));
            }
        }
        if self.series_max_terms < 10 {
            return Err(Error::Config(format!(
                "series_max_terms must be at least 10, got {}",
                self.series_max_terms
            )));
        }
        Ok(())
    }

    pub fn is_k_zero(&self, k: f64) -> bool {
        k.abs() <= self.k_zero_threshold
    }
}

/// The pair `(n, k)`: degree index of the polynomial and the imaginary part
/// of the Whittaker/Bessel orders.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderParams {
    pub n: u32,
    pub k: f64,
}

impl OrderParams {
    pub fn new(n: u32, k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::Config(format!("k must be finite, got {k}")));
        }
        Ok(OrderParams { n, k })
    }

    /// `kappa = n + 1/2`.
    pub fn kappa(&self) -> f64 {
        self.n as f64 + 0.5
    }
}

impl std::fmt::Display for OrderParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n={}, k={}", self.n, self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        EvalConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let cfg = EvalConfig {
            series_max_terms: 5,
            ..EvalConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let cfg = EvalConfig {
            fd_step: 0.0,
            ..EvalConfig::default()
        };
        assert!(cfg.validate().is_err());
        assert!(OrderParams::new(1, f64::NAN).is_err());
    }

    #[test]
    fn k_zero_flag_is_exact_by_default() {
        let cfg = EvalConfig::default();
        assert!(cfg.is_k_zero(0.0));
        assert!(!cfg.is_k_zero(1e-300));
    }
}

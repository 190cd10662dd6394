//! Coefficients of the polynomials `lambda(x) = x Lambda(x)`.

mod coeffs;
mod collocation;

pub use coeffs::{
    boundary_coeffs, check_second_order, check_second_order_derived, coeffs_from_recurrence,
    coeffs_with_convention, iterate_recurrence, laguerre_closed_form, recurrence_from_seed, top_coeff, top_deviation, CoeffVector,
    Convention, N_MAX, SECOND_ORDER_THRESHOLD, TOP_COEFF_TOL,
};
pub use collocation::{
    collocation_grid, collocation_oracle, collocation_oracle_with_limit, CONDITION_LIMIT, FIT_RESIDUAL_LIMIT,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{EvalConfig, OrderParams};

/// Evidence behind the choice of `a_1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConventionResolution {
    pub params: OrderParams,
    pub chosen: Convention,
    /// Relative deviation of the generated top coefficient from `2^n/sqrt(pi)`.
    pub top_deviation_minus: f64,
    pub top_deviation_plus: f64,
    /// Max relative coefficient distance to the collocation fit, when one was made.
    pub oracle_distance_minus: Option<f64>,
    pub oracle_distance_plus: Option<f64>,
}

/// Max over `m` of `|a_m - b_m| / |b_m|`.
pub fn coeff_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / y.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// Decide which Pochhammer seed for `a_1` is consistent with the first-order
/// recurrence and, for `k != 0`, with a direct fit of the identity.
///
/// A convention is accepted only if its top coefficient comes out real and
/// equal to `2^n/sqrt(pi)`; when a fit is available it must also be the one
/// closer to the fitted coefficients.
pub fn resolve_convention(params: OrderParams, cfg: &EvalConfig) -> Result<ConventionResolution> {
    let (minus, plus) = (
        recurrence_from_seed(params, Convention::MinusIk),
        recurrence_from_seed(params, Convention::PlusIk),
    );
    let (dm, dp) = (top_deviation(params, &minus), top_deviation(params, &plus));

    // an ill-conditioned fit carries no evidence either way; the top
    // coefficient test alone then decides
    let fit = if cfg.is_k_zero(params.k) {
        None
    } else {
        match collocation_oracle(params, &collocation_grid(params.n), cfg) {
            Ok(f) => Some(f),
            Err(Error::IllConditioned { cond, .. }) => {
                log::info!("{params}: collocation skipped for convention check (cond {cond:.2e})");
                None
            }
            Err(e) => return Err(e),
        }
    };
    let (om, op) = match &fit {
        Some(f) => (
            Some(coeff_distance(&minus, f.coeffs())),
            Some(coeff_distance(&plus, f.coeffs())),
        ),
        None => (None, None),
    };

    let ok = |dev: f64, mine: Option<f64>, other: Option<f64>| {
        dev <= TOP_COEFF_TOL
            && match (mine, other) {
                (Some(a), Some(b)) => a <= b,
                _ => true,
            }
    };
    let chosen = if ok(dm, om, op) {
        Convention::MinusIk
    } else if ok(dp, op, om) {
        Convention::PlusIk
    } else {
        return Err(Error::InvariantViolation(format!(
            "{params}: neither seed for a_1 yields a real top coefficient (deviations {dm:.3e}, {dp:.3e})"
        )));
    };
    Ok(ConventionResolution {
        params,
        chosen,
        top_deviation_minus: dm,
        top_deviation_plus: dp,
        oracle_distance_minus: om,
        oracle_distance_plus: op,
    })
}

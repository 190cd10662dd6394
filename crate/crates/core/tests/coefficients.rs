//! Coefficient construction: recurrence, Laguerre limit and the conventions.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use whitbessel::kernels::{EvalConfig, OrderParams};
use whitbessel::lambda::*;
use whitbessel::oracle::Oracle;

fn p(n: u32, k: f64) -> OrderParams {
    OrderParams::new(n, k).unwrap()
}

#[test]
fn recurrence_agrees_with_high_precision_iteration() {
    let mut o = Oracle::new();
    for n in [0, 3, 9, 17, 25] {
        for k in [0.1, 1.0, 5.0] {
            let cv = coeffs_from_recurrence(p(n, k)).unwrap();
            let want = o.lambda_coeffs(n, k);
            assert!(coeff_distance(cv.coeffs(), &want) < 1e-14, "n={n} k={k}");
        }
    }
}

#[test]
fn top_coefficient_is_real_up_to_nmax() {
    for n in 0..=N_MAX {
        for k in [1e-3, 0.1, 2.0, 5.0] {
            let cv = coeffs_from_recurrence(p(n, k)).unwrap();
            let top = cv.top();
            assert_relative_eq!(top.re, 2f64.powi(n as i32) / PI.sqrt(), max_relative = 1e-12);
            assert!(top.im.abs() <= 1e-12 * top.re);
        }
    }
}

#[test]
fn small_k_approaches_laguerre() {
    for n in 0..=10 {
        let lag = laguerre_closed_form(n).unwrap();
        let cv = coeffs_from_recurrence(p(n, 1e-7)).unwrap();
        assert!(coeff_distance(cv.coeffs(), lag.coeffs()) < 1e-5, "n={n}");
    }
}

#[test]
fn convention_resolution_prefers_minus_ik() {
    let cfg = EvalConfig::default();
    for (n, k) in [(1, 1.0), (4, 0.5), (8, 2.0)] {
        let r = resolve_convention(p(n, k), &cfg).unwrap();
        assert_eq!(r.chosen, Convention::MinusIk);
        assert!(r.top_deviation_plus > 1e-3);
    }
    let r = resolve_convention(p(3, 1.0), &cfg).unwrap();
    assert!(r.oracle_distance_minus.unwrap() < 1e-12);
    assert!(r.oracle_distance_plus.unwrap() > 1e-3);
}

#[test]
fn collocation_recovers_recurrence_when_conditioned() {
    let cfg = EvalConfig::default();
    for n in 0..=5 {
        let params = p(n, 1.0);
        let fit = collocation_oracle(params, &collocation_grid(n), &cfg).unwrap();
        let rec = coeffs_from_recurrence(params).unwrap();
        assert!(coeff_distance(fit.coeffs(), rec.coeffs()) < 1e-8, "n={n}");
    }
}

#[test]
fn collocation_guard_refuses_high_degree() {
    let cfg = EvalConfig::default();
    let err = collocation_oracle(p(8, 0.5), &collocation_grid(8), &cfg).unwrap_err();
    assert!(matches!(err, whitbessel::Error::IllConditioned { .. }));
}

#[test]
fn derived_second_order_holds_and_printed_does_not() {
    let cv = coeffs_from_recurrence(p(9, 0.7)).unwrap();
    assert!(check_second_order_derived(&cv).pass);
    assert!(!check_second_order(&cv).pass);
    let lag = laguerre_closed_form(9).unwrap();
    assert!(check_second_order_derived(&lag).pass);
}

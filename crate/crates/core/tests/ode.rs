//! Coupled equation, fourth-order equation, indicial exponents and constants.

use num_complex::Complex64;
use whitbessel::kernels::{EvalConfig, OrderParams};
use whitbessel::lambda::{coeffs_from_recurrence, laguerre_closed_form};
use whitbessel::ode::*;
use whitbessel::oracle::Oracle;

fn p(n: u32, k: f64) -> OrderParams {
    OrderParams::new(n, k).unwrap()
}

#[test]
fn coupled_equation_is_exact() {
    for n in 0..=20 {
        assert!(coupled_residual(&laguerre_closed_form(n).unwrap()).pass);
        for k in [0.1, 1.0, 5.0] {
            let r = coupled_residual(&coeffs_from_recurrence(p(n, k)).unwrap());
            assert!(r.pass, "n={n} k={k}: {:e}", r.max_residual());
        }
    }
}

#[test]
fn lambda_solves_fourth_order_equation() {
    for (n, k) in [(0, 0.5), (3, 1.0), (6, 2.0)] {
        let cv = coeffs_from_recurrence(p(n, k)).unwrap();
        assert!(polynomial_solution_check(&cv, &BASIS_GRID).pass);
    }
}

#[test]
fn printed_a3_differs_only_in_constant() {
    for k in [0.5, 1.0] {
        let params = p(2, k);
        let (a, b) = (ode4_coeffs(params), ode4_coeffs_printed(params));
        let diff = b.a3.coeff(0) - a.a3.coeff(0);
        assert!(diff.norm() > 1e-3);
        assert_eq!(a.a1, b.a1);
        assert_eq!(a.a5, b.a5);
        assert_eq!(a3_constant_corrected(k) - a3_constant_printed(k), -diff);
    }
}

#[test]
fn products_solve_and_control_does_not() {
    let cfg = EvalConfig::default();
    let reports = product_solution_check(p(2, 1.0), &BASIS_GRID, &cfg).unwrap();
    assert_eq!(reports.len(), 6);
    for r in &reports {
        assert!(r.pass, "{}: {:?}", r.check, r.residuals);
    }
    let control = reports.iter().find(|r| r.check == "ode4_control").unwrap();
    assert!(control.max_residual() >= CONTROL_THRESHOLD);
}

#[test]
fn indicial_roots_and_printed_quadratic() {
    for k in [0.5, 1.0, 2.0] {
        let a = indicial_analysis(p(3, k)).unwrap();
        assert!(a.matches);
        assert!(a.report().pass);
        assert!(!a.printed_report().pass);
        let want = [0.0, 1.0].map(|r| Complex64::new(r, 0.0));
        for w in want {
            assert!(a.roots.iter().any(|r| (r - w).norm() < 1e-10));
        }
    }
    assert!(indicial_analysis(p(3, 0.0)).is_err());
}

#[test]
fn constants_match_oracle_c4() {
    let mut o = Oracle::new();
    for (n, k) in [(0, 0.5), (4, 1.0), (7, 2.0)] {
        let cv = coeffs_from_recurrence(p(n, k)).unwrap();
        let c = constants_linear_system(&cv).unwrap();
        let want = o.connection_c4(n, k).unwrap();
        assert!((c.c4 - want).norm() < 1e-10 * want.norm(), "n={n} k={k}");
        assert!((c.c2 - 1.0).norm() < 1e-12 && c.c3.norm() < 1e-12);
    }
}

#[test]
fn reconstruction_and_k_limit() {
    let cfg = EvalConfig::default();
    for n in 0..=6 {
        let cv = coeffs_from_recurrence(p(n, 0.5)).unwrap();
        let reports = lambda_reconstruction(&cv, &RECONSTRUCTION_GRID, &cfg).unwrap();
        let main = reports.iter().find(|r| r.check == "reconstruction").unwrap();
        assert!(main.pass, "n={n}: {:?}", main.residuals);
        assert!(k_limit_check(n).unwrap().pass);
    }
    let k0 = lambda_reconstruction(&laguerre_closed_form(3).unwrap(), &RECONSTRUCTION_GRID, &cfg).unwrap();
    assert!(k0.iter().all(|r| r.pass));
}

#[test]
fn trial_conditions_hold() {
    let cfg = EvalConfig::default();
    for r in trial_condition_check(p(3, 1.0), &[0.5, 1.0, 2.0, 4.0], &cfg).unwrap() {
        assert!(r.pass, "{}: {:?}", r.check, r.residuals);
    }
}

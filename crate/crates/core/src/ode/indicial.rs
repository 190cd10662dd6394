//! Exponents of the Frobenius solutions at the regular singular point `x = 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::kernels::OrderParams;
use crate::numeric::{PolyC, I};
use crate::ode::ode4::{ode4_coeffs, ode4_coeffs_printed, Ode4Coeffs};
use crate::report::ResidualReport;

pub const ROOT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndicialAnalysis {
    pub params: OrderParams,
    /// Roots of the leading-balance polynomial of the corrected equation.
    pub roots: Vec<Complex64>,
    /// `{0, 1, 2ik, 1-2ik}`: sums of the small-`x` exponents of the basis factors.
    pub predicted: Vec<Complex64>,
    /// `{0, 1}` plus the roots of the published quadratic `s^2 - s - 4(1-k)(i+k)`.
    pub printed_roots: Vec<Complex64>,
    /// Leading-balance roots of the equation with the published `a3`.
    pub printed_ode_roots: Vec<Complex64>,
    /// Per-root distance of `roots` to `predicted` after optimal matching.
    pub deviations: Vec<f64>,
    pub printed_deviations: Vec<f64>,
    pub matches: bool,
}

fn falling(d: usize) -> PolyC {
    // s (s-1) ... (s-d+1)
    (0..d).fold(PolyC::constant(Complex64::new(1.0, 0.0)), |acc, j| {
        acc * PolyC::new(vec![Complex64::new(-(j as f64), 0.0), Complex64::new(1.0, 0.0)])
    })
}

/// Leading balance for `f = x^s`: with `v_i` the valuation of the
/// coefficient of `f^(d_i)`, keep the terms minimizing `v_i - d_i` and sum
/// `c_i s(s-1)...(s-d_i+1)`.
pub fn indicial_polynomial(c: &Ode4Coeffs) -> PolyC {
    let shifts: Vec<Option<(i64, Complex64, usize)>> = c
        .as_array()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let d = 4 - i;
            a.valuation().map(|v| (v as i64 - d as i64, a.coeff(v), d))
        })
        .collect();
    let lowest = shifts.iter().flatten().map(|s| s.0).min().unwrap_or(0);
    shifts
        .iter()
        .flatten()
        .filter(|s| s.0 == lowest)
        .fold(PolyC::zero(), |acc, &(_, lead, d)| acc + &falling(d) * lead)
}

/// All complex roots by Aberth iteration followed by Newton polishing.
pub fn poly_roots(p: &PolyC) -> Vec<Complex64> {
    let deg = match p.degree() {
        Some(d) if d > 0 => d,
        _ => return Vec::new(),
    };
    let lead = p.coeff(deg);
    let monic = p.scale(lead.inv());
    let dp = monic.derivative();
    let radius = 1.0 + (0..deg).map(|j| monic.coeff(j).norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|j| Complex64::from_polar(0.5 * radius, 0.4 + 2.0 * std::f64::consts::PI * j as f64 / deg as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for j in 0..deg {
            let ratio = monic.eval(z[j]) / dp.eval(z[j]);
            let repulse: Complex64 = (0..deg).filter(|&l| l != j).map(|l| (z[j] - z[l]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulse);
            if step.is_finite() {
                z[j] -= step;
                moved = moved.max(step.norm() / z[j].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = dp.eval(*r);
            if d.norm() == 0.0 {
                break;
            }
            let step = monic.eval(*r) / d;
            if !step.is_finite() {
                break;
            }
            *r -= step;
        }
    }
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    z
}

/// Pair each root with a target so the largest scaled distance is minimal;
/// returns the distances in target order.
fn match_roots(roots: &[Complex64], targets: &[Complex64]) -> Vec<f64> {
    fn permute(k: usize, idx: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == idx.len() {
            out.push(idx.clone());
            return;
        }
        for j in k..idx.len() {
            idx.swap(k, j);
            permute(k + 1, idx, out);
            idx.swap(k, j);
        }
    }
    if roots.len() != targets.len() {
        return vec![f64::INFINITY; targets.len()];
    }
    let mut perms = Vec::new();
    permute(0, &mut (0..roots.len()).collect(), &mut perms);
    let dist = |perm: &[usize]| -> Vec<f64> {
        targets
            .iter()
            .zip(perm)
            .map(|(t, &j)| (roots[j] - t).norm() / t.norm().max(1.0))
            .collect()
    };
    perms
        .iter()
        .map(|p| dist(p))
        .min_by(|a, b| a.iter().cloned().fold(0.0, f64::max).total_cmp(&b.iter().cloned().fold(0.0, f64::max)))
        .unwrap_or_default()
}

pub fn predicted_exponents(k: f64) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    vec![Complex64::new(0.0, 0.0), one, 2.0 * I * k, one - 2.0 * I * k]
}

/// `0, 1` and the roots of `s^2 - s - 4(1-k)(i+k)`.
pub fn printed_exponents(k: f64) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let q = PolyC::new(vec![-4.0 * (1.0 - k) * (I + k), -one, one]);
    let mut r = vec![Complex64::new(0.0, 0.0), one];
    r.extend(poly_roots(&q));
    r
}

pub fn indicial_analysis(params: OrderParams) -> Result<IndicialAnalysis> {
    if !(params.k > 0.0) {
        return Err(domain("indicial_analysis", format!("requires k > 0, got {}", params.k)));
    }
    let roots = poly_roots(&indicial_polynomial(&ode4_coeffs(params)));
    let printed_ode_roots = poly_roots(&indicial_polynomial(&ode4_coeffs_printed(params)));
    let predicted = predicted_exponents(params.k);
    let printed_roots = printed_exponents(params.k);
    let deviations = match_roots(&roots, &predicted);
    let printed_deviations = match_roots(&printed_roots, &predicted);
    let matches = deviations.iter().all(|d| *d <= ROOT_TOL);
    Ok(IndicialAnalysis {
        params,
        roots,
        predicted,
        printed_roots,
        printed_ode_roots,
        deviations,
        printed_deviations,
        matches,
    })
}

impl IndicialAnalysis {
    /// Load-bearing: computed roots against the predicted set.
    pub fn report(&self) -> ResidualReport {
        let grid = (0..self.deviations.len()).map(|j| j as f64).collect();
        ResidualReport::new("indicial_roots", self.params, grid, self.deviations.clone(), ROOT_TOL)
    }

    /// Advisory: the published quadratic against the predicted set.
    pub fn printed_report(&self) -> ResidualReport {
        let grid = (0..self.printed_deviations.len()).map(|j| j as f64).collect();
        ResidualReport::new(
            "indicial_printed_quadratic",
            self.params,
            grid,
            self.printed_deviations.clone(),
            ROOT_TOL,
        )
    }
}

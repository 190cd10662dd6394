//! Nine-point central finite differences.

use num_complex::Complex64;

use crate::error::Result;

/// Weights on offsets `-4..=4` for derivative orders 0 through 4
/// (orders 1 and 2 are eighth-order accurate, 3 and 4 sixth-order).
const WEIGHTS: [[f64; 9]; 5] = [
    [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
    [
        1.0 / 280.0,
        -4.0 / 105.0,
        1.0 / 5.0,
        -4.0 / 5.0,
        0.0,
        4.0 / 5.0,
        -1.0 / 5.0,
        4.0 / 105.0,
        -1.0 / 280.0,
    ],
    [
        -1.0 / 560.0,
        8.0 / 315.0,
        -1.0 / 5.0,
        8.0 / 5.0,
        -205.0 / 72.0,
        8.0 / 5.0,
        -1.0 / 5.0,
        8.0 / 315.0,
        -1.0 / 560.0,
    ],
    [
        -7.0 / 240.0,
        3.0 / 10.0,
        -169.0 / 120.0,
        61.0 / 30.0,
        0.0,
        -61.0 / 30.0,
        169.0 / 120.0,
        -3.0 / 10.0,
        7.0 / 240.0,
    ],
    [
        7.0 / 240.0,
        -2.0 / 5.0,
        169.0 / 60.0,
        -122.0 / 15.0,
        91.0 / 8.0,
        -122.0 / 15.0,
        169.0 / 60.0,
        -2.0 / 5.0,
        7.0 / 240.0,
    ],
];

/// `[f, f', f'', f''', f'''']` at `x` with step `h`.
pub(crate) fn derivatives<F>(f: &F, x: f64, h: f64) -> Result<[Complex64; 5]>
where
    F: Fn(f64) -> Result<Complex64> + ?Sized,
{
    let mut vals = [Complex64::new(0.0, 0.0); 9];
    for (j, v) in vals.iter_mut().enumerate() {
        *v = f(x + (j as f64 - 4.0) * h)?;
    }
    let mut out = [Complex64::new(0.0, 0.0); 5];
    for (order, w) in WEIGHTS.iter().enumerate() {
        let s: Complex64 = w.iter().zip(&vals).map(|(wj, v)| v * *wj).sum();
        out[order] = s / h.powi(order as i32);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_low_degree_polynomials() {
        // x^6 is within reach of every stencil
        let f = |x: f64| -> Result<Complex64> { Ok(Complex64::new(x.powi(6), 0.0)) };
        let x = 1.3;
        let d = derivatives(&f, x, 0.05).unwrap();
        let want = [x.powi(6), 6.0 * x.powi(5), 30.0 * x.powi(4), 120.0 * x.powi(3), 360.0 * x * x];
        for (got, w) in d.iter().zip(want) {
            assert!((got.re - w).abs() < 1e-8 * w.abs(), "{got} vs {w}");
        }
    }

    #[test]
    fn weights_sum_to_zero_for_derivatives() {
        for w in &WEIGHTS[1..] {
            assert!(w.iter().sum::<f64>().abs() < 1e-14);
        }
    }
}

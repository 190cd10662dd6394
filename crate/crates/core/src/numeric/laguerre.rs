/// Laguerre polynomial `L_n(z)` by the three-term recurrence
/// `(m+1) L_{m+1} = (2m+1-z) L_m - m L_{m-1}`.
pub fn laguerre(n: u32, z: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - z;
    for m in 1..n {
        let m = m as f64;
        let next = ((2.0 * m + 1.0 - z) * cur - m * prev) / (m + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Ascending monomial coefficients of `L_n`:
/// `L_n(z) = sum_j (-1)^j C(n, j) z^j / j!`.
pub fn laguerre_coeffs(n: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    // C(n, j) / j!, built incrementally to stay exact as long as possible
    let mut c = 1.0;
    for j in 0..=n {
        if j > 0 {
            c *= (n - j + 1) as f64 / (j as f64 * j as f64);
        }
        out.push(if j % 2 == 0 { c } else { -c });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        assert_eq!(laguerre(0, 4.2), 1.0);
        assert_eq!(laguerre(1, 3.0), -2.0);
        assert!((laguerre(2, 2.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn coefficients_agree_with_recurrence() {
        for n in 0..=12 {
            let cs = laguerre_coeffs(n);
            for z in [0.0, 0.7, 3.0, 9.5] {
                let horner = cs.iter().rev().fold(0.0, |acc, c| acc * z + c);
                let r = laguerre(n, z);
                // monomial form cancels badly for large z; compare against the term magnitudes
                let scale: f64 = cs.iter().enumerate().map(|(j, c)| (c * z.powi(j as i32)).abs()).sum();
                assert!((horner - r).abs() <= 1e-14 * scale, "n={n} z={z}");
            }
        }
    }
}

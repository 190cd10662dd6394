//! Independent high-precision reference implementation (about 95 decimal
//! digits of working precision) for cross-checking the double-precision
//! kernels.
//!
//! Nothing here shares code with [`kernels`](crate::kernels): gamma uses a
//! shifted Stirling series with Bernoulli numbers computed on the fly,
//! series are summed by brute force, and no closed forms are assumed beyond
//! the `mu = 0` Laguerre case of `W`.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_complex::Complex64;

use crate::error::{Error, Result};

const P: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;
const STIRLING_TERMS: usize = 30;
const STIRLING_MIN_RE: f64 = 40.0;
const MAX_SERIES_TERMS: usize = 50_000;

#[derive(Clone, Debug)]
struct BC {
    re: BigFloat,
    im: BigFloat,
}

fn bf(x: f64) -> BigFloat {
    BigFloat::from_f64(x, P)
}

fn bu(x: u64) -> BigFloat {
    BigFloat::from_u64(x, P)
}

impl BC {
    fn new(re: BigFloat, im: BigFloat) -> Self {
        BC { re, im }
    }
    fn from_c64(z: Complex64) -> Self {
        BC::new(bf(z.re), bf(z.im))
    }
    fn real(x: BigFloat) -> Self {
        BC::new(x, bu(0))
    }
    fn one() -> Self {
        BC::real(bu(1))
    }
    fn zero() -> Self {
        BC::real(bu(0))
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &BC) -> BC {
        BC::new(self.re.add(&o.re, P, RM), self.im.add(&o.im, P, RM))
    }
    fn sub(&self, o: &BC) -> BC {
        BC::new(self.re.sub(&o.re, P, RM), self.im.sub(&o.im, P, RM))
    }
    fn neg(&self) -> BC {
        BC::new(self.re.neg(), self.im.neg())
    }
    fn conj(&self) -> BC {
        BC::new(self.re.clone(), self.im.neg())
    }
    fn add_re(&self, x: &BigFloat) -> BC {
        BC::new(self.re.add(x, P, RM), self.im.clone())
    }
    fn mul(&self, o: &BC) -> BC {
        let re = self.re.mul(&o.re, P, RM).sub(&self.im.mul(&o.im, P, RM), P, RM);
        let im = self.re.mul(&o.im, P, RM).add(&self.im.mul(&o.re, P, RM), P, RM);
        BC::new(re, im)
    }
    fn scale(&self, s: &BigFloat) -> BC {
        BC::new(self.re.mul(s, P, RM), self.im.mul(s, P, RM))
    }
    fn norm_sqr(&self) -> BigFloat {
        self.re.mul(&self.re, P, RM).add(&self.im.mul(&self.im, P, RM), P, RM)
    }
    fn div(&self, o: &BC) -> BC {
        let d = o.norm_sqr();
        self.mul(&o.conj()).scale(&d.reciprocal(P, RM))
    }
    /// Largest binary exponent among the nonzero parts.
    fn mag_exp(&self) -> Option<i64> {
        let e = |x: &BigFloat| (!x.is_zero()).then(|| x.exponent().map(|e| e as i64)).flatten();
        match (e(&self.re), e(&self.im)) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }
}

/// Arbitrary-precision reference evaluator.
pub struct Oracle {
    cc: Consts,
    pi: BigFloat,
    ln_sqrt_2pi: BigFloat,
    stirling: Vec<BigFloat>,
}

impl Default for Oracle {
    fn default() -> Self {
        Self::new()
    }
}

impl Oracle {
    pub fn new() -> Self {
        let mut cc = Consts::new().expect("astro-float constant cache");
        let pi = cc.pi(P, RM);
        let two_pi = pi.mul(&bu(2), P, RM);
        let ln_sqrt_2pi = two_pi.ln(P, RM, &mut cc).div(&bu(2), P, RM);
        let stirling = stirling_coefficients();
        Oracle {
            cc,
            pi,
            ln_sqrt_2pi,
            stirling,
        }
    }

    fn to_f64(&mut self, x: &BigFloat) -> f64 {
        if x.is_zero() {
            return 0.0;
        }
        let s = x
            .format(Radix::Dec, RM, &mut self.cc)
            .expect("formatting a finite BigFloat");
        s.parse::<f64>().unwrap_or(f64::NAN)
    }

    fn to_c64(&mut self, z: &BC) -> Complex64 {
        Complex64::new(self.to_f64(&z.re), self.to_f64(&z.im))
    }

    fn exp(&mut self, z: &BC) -> BC {
        let r = z.re.exp(P, RM, &mut self.cc);
        let c = z.im.cos(P, RM, &mut self.cc);
        let s = z.im.sin(P, RM, &mut self.cc);
        BC::new(r.mul(&c, P, RM), r.mul(&s, P, RM))
    }

    fn atan2(&mut self, y: &BigFloat, x: &BigFloat) -> BigFloat {
        if x.is_zero() {
            let half_pi = self.pi.div(&bu(2), P, RM);
            return if y.is_negative() { half_pi.neg() } else { half_pi };
        }
        let base = y.div(x, P, RM).atan(P, RM, &mut self.cc);
        if x.is_positive() {
            base
        } else if y.is_negative() {
            base.sub(&self.pi, P, RM)
        } else {
            base.add(&self.pi, P, RM)
        }
    }

    /// Principal logarithm.
    fn ln(&mut self, z: &BC) -> BC {
        let re = z.norm_sqr().ln(P, RM, &mut self.cc).div(&bu(2), P, RM);
        let im = self.atan2(&z.im, &z.re);
        BC::new(re, im)
    }

    fn stirling_ln_gamma(&mut self, w: &BC) -> BC {
        let lw = self.ln(w);
        let half = bf(0.5);
        let mut out = w.add_re(&half.neg()).mul(&lw).sub(w).add_re(&self.ln_sqrt_2pi);
        let winv = BC::one().div(w);
        let winv2 = winv.mul(&winv);
        let mut pow = winv;
        for c in &self.stirling {
            out = out.add(&pow.scale(c));
            pow = pow.mul(&winv2);
        }
        out
    }

    fn gamma_bc(&mut self, z: &BC) -> Option<BC> {
        let zr = self.to_f64(&z.re);
        if z.im.is_zero() && z.re.is_int() && !z.re.is_positive() {
            return None;
        }
        let shift = (STIRLING_MIN_RE - zr).ceil().max(0.0) as usize;
        let mut w = z.clone();
        let mut prod = BC::one();
        for _ in 0..shift {
            prod = prod.mul(&w);
            w = w.add_re(&bu(1));
        }
        let lg = self.stirling_ln_gamma(&w);
        Some(self.exp(&lg).div(&prod))
    }

    /// `1 / Gamma(z)`, zero at the poles.
    fn rgamma_bc(&mut self, z: &BC) -> BC {
        match self.gamma_bc(z) {
            Some(g) => BC::one().div(&g),
            None => BC::zero(),
        }
    }

    /// `Gamma(z)`, or `None` at a pole.
    pub fn gamma(&mut self, z: Complex64) -> Option<Complex64> {
        let g = self.gamma_bc(&BC::from_c64(z))?;
        Some(self.to_c64(&g))
    }

    fn sum_series(&mut self, first: BC, mut ratio: impl FnMut(usize) -> BC) -> BC {
        let mut term = first.clone();
        let mut sum = first;
        let mut small = 0;
        for m in 0..MAX_SERIES_TERMS {
            term = term.mul(&ratio(m));
            sum = sum.add(&term);
            let negligible = match (term.mag_exp(), sum.mag_exp()) {
                (None, _) => true,
                (Some(t), Some(s)) => t < s - P as i64 - 4,
                (Some(_), None) => false,
            };
            if negligible {
                small += 1;
                if small == 3 {
                    break;
                }
            } else {
                small = 0;
            }
        }
        sum
    }

    fn kummer_bc(&mut self, a: &BC, b: &BC, z: &BC) -> BC {
        let (a, b, z) = (a.clone(), b.clone(), z.clone());
        self.sum_series(BC::one(), move |m| {
            let mb = bu(m as u64);
            let num = a.add_re(&mb).mul(&z);
            let den = b.add_re(&mb).scale(&bu(m as u64 + 1));
            num.div(&den)
        })
    }

    /// Kummer `M(a, b, z)`.
    pub fn kummer_m(&mut self, a: Complex64, b: Complex64, z: Complex64) -> Complex64 {
        let v = self.kummer_bc(&BC::from_c64(a), &BC::from_c64(b), &BC::from_c64(z));
        self.to_c64(&v)
    }

    fn whittaker_m_bc(&mut self, kappa: &BC, mu: &BC, z: &BigFloat) -> BC {
        let half = bf(0.5);
        let a = mu.add_re(&half).sub(kappa);
        let b = mu.scale(&bu(2)).add_re(&bu(1));
        let series = self.kummer_bc(&a, &b, &BC::real(z.clone()));
        let lz = z.ln(P, RM, &mut self.cc);
        let expo = mu.add_re(&half).scale(&lz).add_re(&z.mul(&half, P, RM).neg());
        self.exp(&expo).mul(&series)
    }

    /// `M_{kappa,mu}(z)`, real `z > 0`.
    pub fn whittaker_m(&mut self, kappa: Complex64, mu: Complex64, z: f64) -> Complex64 {
        let v = self.whittaker_m_bc(&BC::from_c64(kappa), &BC::from_c64(mu), &bf(z));
        self.to_c64(&v)
    }

    fn whittaker_w_bc(&mut self, kappa: Complex64, mu: Complex64, z: &BigFloat) -> Result<BC> {
        if mu == Complex64::new(0.0, 0.0) {
            let n = kappa.re - 0.5;
            if kappa.im != 0.0 || n < 0.0 || n.fract() != 0.0 {
                return Err(Error::DegenerateParameter {
                    function: "oracle::whittaker_w",
                    two_mu: mu * 2.0,
                });
            }
            return Ok(BC::real(self.laguerre_w(n as u32, z)));
        }
        let two_mu = mu * 2.0;
        if two_mu.im == 0.0 && two_mu.re.fract() == 0.0 {
            return Err(Error::DegenerateParameter {
                function: "oracle::whittaker_w",
                two_mu,
            });
        }
        let (kb, mb) = (BC::from_c64(kappa), BC::from_c64(mu));
        let half = bf(0.5);
        let two = bu(2);
        let g_minus = self.gamma_bc(&mb.scale(&two).neg()).expect("2mu not an integer");
        let g_plus = self.gamma_bc(&mb.scale(&two)).expect("2mu not an integer");
        let r1 = self.rgamma_bc(&BC::real(half.clone()).sub(&mb).sub(&kb));
        let r2 = self.rgamma_bc(&BC::real(half).add(&mb).sub(&kb));
        let mut out = BC::zero();
        if !r1.is_zero() {
            out = out.add(&g_minus.mul(&r1).mul(&self.whittaker_m_bc(&kb, &mb, z)));
        }
        if !r2.is_zero() {
            out = out.add(&g_plus.mul(&r2).mul(&self.whittaker_m_bc(&kb, &mb.neg(), z)));
        }
        Ok(out)
    }

    /// `(-1)^n n! z^{1/2} e^{-z/2} L_n(z)`.
    fn laguerre_w(&mut self, n: u32, z: &BigFloat) -> BigFloat {
        let mut prev = bu(1);
        let mut cur = bu(1).sub(z, P, RM);
        if n == 0 {
            cur = prev.clone();
        }
        for m in 1..n {
            let mb = bu(m as u64);
            let c = bu(2 * m as u64 + 1).sub(z, P, RM);
            let next = c
                .mul(&cur, P, RM)
                .sub(&mb.mul(&prev, P, RM), P, RM)
                .div(&bu(m as u64 + 1), P, RM);
            prev = cur;
            cur = next;
        }
        let mut fact = bu(1);
        for j in 1..=n {
            fact = fact.mul(&bu(j as u64), P, RM);
        }
        let env = z.sqrt(P, RM).mul(&z.mul(&bf(-0.5), P, RM).exp(P, RM, &mut self.cc), P, RM);
        let v = fact.mul(&env, P, RM).mul(&cur, P, RM);
        if n % 2 == 1 {
            v.neg()
        } else {
            v
        }
    }

    /// `W_{kappa,mu}(z)`, real `z > 0`. Integer `2mu` is refused except the
    /// Laguerre case `mu = 0, kappa = n + 1/2`.
    pub fn whittaker_w(&mut self, kappa: Complex64, mu: Complex64, z: f64) -> Result<Complex64> {
        let v = self.whittaker_w_bc(kappa, mu, &bf(z))?;
        Ok(self.to_c64(&v))
    }

    fn bessel_i_bc(&mut self, nu: Complex64, x: f64) -> BC {
        let nu = if nu.im == 0.0 && nu.re < 0.0 && nu.re.fract() == 0.0 {
            -nu
        } else {
            nu
        };
        let nub = BC::from_c64(nu);
        let half_x = bf(x).div(&bu(2), P, RM);
        let lh = half_x.ln(P, RM, &mut self.cc);
        let pow = self.exp(&nub.scale(&lh));
        let first = pow.mul(&self.rgamma_bc(&nub.add_re(&bu(1))));
        let q = half_x.mul(&half_x, P, RM);
        self.sum_series(first, move |m| {
            let m1 = bu(m as u64 + 1);
            BC::real(q.clone()).div(&nub.add_re(&m1).scale(&m1))
        })
    }

    pub fn bessel_i(&mut self, nu: Complex64, x: f64) -> Complex64 {
        let v = self.bessel_i_bc(nu, x);
        self.to_c64(&v)
    }

    pub fn bessel_i_tilde(&mut self, nu: Complex64, x: f64) -> Complex64 {
        let v = self.bessel_i_bc(nu, x).add(&self.bessel_i_bc(-nu, x));
        self.to_c64(&v)
    }

    fn bessel_k_bc(&mut self, nu: Complex64, x: f64) -> Result<BC> {
        let xb = bf(x);
        let w = self.whittaker_w_bc(Complex64::new(0.0, 0.0), nu, &xb.mul(&bu(2), P, RM))?;
        let pref = self.pi.div(&xb.mul(&bu(2), P, RM), P, RM).sqrt(P, RM);
        Ok(w.scale(&pref))
    }

    /// `K_nu(x) = sqrt(pi/(2x)) W_{0,nu}(2x)`; integer `2nu` is refused.
    pub fn bessel_k(&mut self, nu: Complex64, x: f64) -> Result<Complex64> {
        let v = self.bessel_k_bc(nu, x)?;
        Ok(self.to_c64(&v))
    }

    fn lambda_coeffs_bc(&mut self, n: u32, k: f64) -> Vec<BC> {
        let ik = BC::new(bu(0), bf(k));
        let sqrt_pi = self.pi.sqrt(P, RM);
        // a_1 = (-1)^n (1 - ik)_n / sqrt(pi)
        let base = BC::one().sub(&ik);
        let mut a1 = BC::one();
        for j in 0..n {
            a1 = a1.mul(&base.add_re(&bu(j as u64)));
        }
        a1 = a1.scale(&sqrt_pi.reciprocal(P, RM));
        if n % 2 == 1 {
            a1 = a1.neg();
        }
        let two_n1 = bu(2 * n as u64 + 1);
        let mut out = vec![a1];
        for m in 1..=n as u64 {
            let am = out.last().unwrap().clone();
            let one_m2 = bf(1.0 - 2.0 * m as f64);
            let num = am.scale(&two_n1).add(&am.conj().scale(&one_m2)).neg();
            let den = BC::real(bu(m)).sub(&ik.scale(&bu(2))).scale(&bu(m));
            out.push(num.div(&den));
        }
        out
    }

    /// Coefficients `a_1 .. a_{n+1}` of `x Lambda`, from the first-order
    /// recurrence started at `a_1 = (-1)^n (1-ik)_n / sqrt(pi)`.
    pub fn lambda_coeffs(&mut self, n: u32, k: f64) -> Vec<Complex64> {
        let v = self.lambda_coeffs_bc(n, k);
        v.iter().map(|z| self.to_c64(z)).collect()
    }

    /// Relative residual of the product identity at `x`, computed entirely in
    /// high precision: `|W(2x) - RHS| / max(|W(2x)|, |x Lambda K_+| + |x Lambda* K_-|)`.
    pub fn identity_residual(&mut self, n: u32, k: f64, x: f64) -> Result<f64> {
        let xb = bf(x);
        let w = self.whittaker_w_bc(
            Complex64::new(n as f64 + 0.5, 0.0),
            Complex64::new(0.0, k),
            &xb.mul(&bu(2), P, RM),
        )?;
        let coeffs = self.lambda_coeffs_bc(n, k);
        let mut lam = BC::zero();
        for c in coeffs.iter().rev() {
            lam = lam.add(c).scale(&xb);
        }
        let kp = self.bessel_k_bc(Complex64::new(0.5, k), x)?;
        let km = self.bessel_k_bc(Complex64::new(0.5, -k), x)?;
        let t1 = lam.mul(&kp);
        let t2 = lam.conj().mul(&km);
        let diff = w.sub(&t1).sub(&t2);
        let d = self.to_f64(&diff.norm_sqr().sqrt(P, RM));
        let s1 = self.to_f64(&w.norm_sqr().sqrt(P, RM));
        let s2 = self.to_f64(&t1.norm_sqr().sqrt(P, RM)) + self.to_f64(&t2.norm_sqr().sqrt(P, RM));
        Ok(d / s1.max(s2))
    }

    /// `c_4 = -(2/pi) cosh(pi k) Gamma(-2ik) / Gamma(-n-ik)`.
    pub fn connection_c4(&mut self, n: u32, k: f64) -> Option<Complex64> {
        let g_num = self.gamma_bc(&BC::new(bu(0), bf(-2.0 * k)))?;
        let r_den = self.rgamma_bc(&BC::new(bf(-(n as f64)), bf(-k)));
        let pk = self.pi.mul(&bf(k), P, RM);
        let cosh = pk.cosh(P, RM, &mut self.cc);
        let s = cosh.mul(&bu(2), P, RM).div(&self.pi, P, RM).neg();
        let v = g_num.mul(&r_den).scale(&s);
        Some(self.to_c64(&v))
    }
}

/// `B_{2m} / (2m (2m-1))` for `m = 1 ..= STIRLING_TERMS`.
fn stirling_coefficients() -> Vec<BigFloat> {
    // Bernoulli numbers from sum_{j=0}^{n} C(n+1, j) B_j = 0, in extra precision
    let wp = P + 128;
    let top = 2 * STIRLING_TERMS;
    let mut b: Vec<BigFloat> = vec![BigFloat::from_u64(1, wp)];
    for n in 1..=top {
        if n > 1 && n % 2 == 1 {
            b.push(BigFloat::from_u64(0, wp));
            continue;
        }
        let mut acc = BigFloat::from_u64(0, wp);
        let mut binom = BigFloat::from_u64(1, wp); // C(n+1, 0)
        for (j, bj) in b.iter().enumerate() {
            acc = acc.add(&binom.mul(bj, wp, RM), wp, RM);
            binom = binom
                .mul(&BigFloat::from_u64((n + 1 - j) as u64, wp), wp, RM)
                .div(&BigFloat::from_u64(j as u64 + 1, wp), wp, RM);
        }
        b.push(acc.div(&BigFloat::from_u64(n as u64 + 1, wp), wp, RM).neg());
    }
    (1..=STIRLING_TERMS)
        .map(|m| {
            let d = BigFloat::from_u64((2 * m * (2 * m - 1)) as u64, wp);
            let mut v = b[2 * m].div(&d, wp, RM);
            v.set_precision(P, RM).expect("precision reduction");
            v
        })
        .collect()
}

//! Double-precision evaluation of eta products and q-series, each value
//! carrying an absolute error bound.

use std::f64::consts::{LN_2, PI};

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::NumericError;
use crate::etaq::eta_multiplier;
use crate::congruence::families::{cpsi40_42_coefficients, cpsi41_coefficients};
use crate::qseries::QSeries;

/// Sample points must sit at least this far from the real axis.
pub const MIN_Y: f64 = 0.05;
/// Cap on the direct-product length of a single eta evaluation.
pub const MAX_TERMS: usize = 5_000_000;
const EPS: f64 = f64::EPSILON;
/// The direct product runs until `|q|^n` drops below this; the rest is
/// summed in closed form.
const SPLIT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self, NumericError> {
        if !x.is_finite() || !y.is_finite() || y < MIN_Y {
            return Err(NumericError::OutsideSafeRegion { y });
        }
        Ok(UpperHalfPoint { x, y })
    }

    pub fn tau(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// A value and an absolute bound on its error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approx {
    pub value: Complex64,
    pub error: f64,
}

#[allow(clippy::should_implement_trait)]
impl Approx {
    pub fn exact(value: Complex64) -> Self {
        Approx { value, error: 0.0 }
    }

    pub fn add(self, o: Approx) -> Approx {
        let value = self.value + o.value;
        Approx { value, error: self.error + o.error + EPS * value.norm() }
    }

    pub fn sub(self, o: Approx) -> Approx {
        self.add(o.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(self, o: Approx) -> Approx {
        let value = self.value * o.value;
        let error = self.value.norm() * o.error + o.value.norm() * self.error + self.error * o.error;
        Approx { value, error: error + 2.0 * EPS * value.norm() }
    }

    pub fn scale(self, c: Complex64) -> Approx {
        let value = self.value * c;
        Approx { value, error: self.error * c.norm() + 2.0 * EPS * value.norm() }
    }

    /// `exp` of a logarithm known to within `error`.
    pub fn exp(self) -> Approx {
        let value = self.value.exp();
        Approx { value, error: value.norm() * (self.error.exp_m1() + 4.0 * EPS) }
    }

    pub fn relative_error(&self) -> f64 {
        self.error / self.value.norm()
    }
}

/// `exp(w) - 1` without cancellation for small `|w|`.
fn expm1(w: Complex64) -> Complex64 {
    let (a, b) = (w.re, w.im);
    let half = (b / 2.0).sin();
    Complex64::new(a.exp_m1() * b.cos() - 2.0 * half * half, a.exp() * b.sin())
}

/// `e^{2 pi i n z}` with the phase reduced mod 1 before scaling, so its
/// error does not grow with `n`.
fn q_power(n: u64, z: Complex64) -> Complex64 {
    let n = n as f64;
    let hi = n * z.re;
    let lo = n.mul_add(z.re, -hi);
    let frac = (hi - hi.round()) + lo;
    Complex64::from_polar((-2.0 * PI * n * z.im).exp(), 2.0 * PI * frac)
}

/// `log eta(z)` (one branch) straight from the product, with an absolute
/// error bound. The product `prod (1 - q^n)` is multiplied out while `|q|^n > 0.3`;
/// the remainder is `-sum_k q^{k(m+1)} / (k (1 - q^k))`, summed until the
/// geometric bound on what is left drops below `1e-18`.
pub fn log_eta_direct(z: Complex64) -> Result<Approx, NumericError> {
    if z.im <= 0.0 {
        return Err(NumericError::OutsideSafeRegion { y: z.im });
    }
    let two_pi_i_z = Complex64::new(0.0, 2.0 * PI) * z;
    let log_r = -2.0 * PI * z.im;
    let m = ((SPLIT.ln() / log_r).ceil() as usize).max(1);
    if m > MAX_TERMS {
        return Err(NumericError::ConvergenceBudgetExceeded { needed: m, cap: MAX_TERMS });
    }
    let one = Complex64::new(1.0, 0.0);
    let mut acc = two_pi_i_z / 24.0;
    let mut error = 0.0;
    let mut chunk = one;
    for n in 1..=m {
        let factor = one - q_power(n as u64, z);
        error += 8.0 * EPS / factor.norm();
        chunk *= factor;
        if n % 32 == 0 || n == m {
            let l = chunk.ln();
            error += 4.0 * EPS * l.norm();
            acc += l;
            chunk = one;
        }
    }
    // closed-form tail over n > m
    let lead = q_power(m as u64 + 1, z);
    let lead_abs = lead.norm();
    let mut power = lead;
    let mut k = 1usize;
    loop {
        let denom = -expm1(two_pi_i_z * k as f64);
        let term = power / (denom * k as f64);
        acc -= term;
        error += 4.0 * EPS * term.norm() * (k as f64 + 2.0);
        let r_k1 = (log_r * (k + 1) as f64).exp();
        let rest = lead_abs.powi(k as i32 + 1) / ((k + 1) as f64 * (1.0 - r_k1) * (1.0 - lead_abs));
        if rest < 1e-18 || k > 400 {
            error += rest;
            break;
        }
        power *= lead;
        k += 1;
    }
    Ok(Approx { value: acc, error })
}

/// The point `m tau` for an integral `m` with positive determinant. Points
/// near the real axis (Atkin-Lehner images and their conjugates) are kept in
/// this form so that every Mobius map is applied to `tau` in one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Image {
    pub m: [[i64; 2]; 2],
    pub tau: Complex64,
}

fn mat_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

impl Image {
    pub fn of(tau: Complex64) -> Self {
        Image { m: [[1, 0], [0, 1]], tau }
    }

    /// The point `g m tau`.
    pub fn then(self, g: [[i64; 2]; 2]) -> Self {
        Image { m: mat_mul(g, self.m), tau: self.tau }
    }

    pub fn point(&self) -> Complex64 {
        mobius(self.m, self.tau)
    }

    /// `m tau` and a bound on its rounding error, `tau` taken as exact.
    pub fn point_with_error(&self) -> (Complex64, f64) {
        let [[a, b], [c, d]] = self.m.map(|r| r.map(|x| x as f64));
        let t = self.tau;
        let num = t * a + b;
        let den = t * c + d;
        let cond = |x: f64, y: f64, v: Complex64| EPS * (x.abs() * t.norm() + y.abs() + v.norm()) / v.norm();
        let z = num / den;
        (z, z.norm() * (cond(a, b, num) + cond(c, d, den) + 2.0 * EPS))
    }
}

/// `gamma` in `SL_2(Z)` with `gamma z` in the standard fundamental domain.
pub fn reduce(z: Complex64) -> ([[i64; 2]; 2], Complex64) {
    let mut g = [[1i64, 0], [0, 1]];
    let mut t = z;
    for _ in 0..10_000 {
        let n = t.re.round();
        if n != 0.0 {
            t.re -= n;
            g = mat_mul([[1, -(n as i64)], [0, 1]], g);
        }
        if t.norm_sqr() >= 1.0 {
            break;
        }
        t = -t.inv();
        g = mat_mul([[0, -1], [1, 0]], g);
    }
    (g, t)
}

/// Bound on `|d/dt log eta(t)| = |pi E_2(t) / 12|`.
fn log_eta_slope(t: Complex64) -> f64 {
    let r = (-2.0 * PI * t.im).exp();
    PI / 12.0 * (1.0 + 24.0 * r / ((1.0 - r) * (1.0 - r)))
}

/// `log eta(m tau)` through `eta(M t) = nu(M) (c t + d)^{1/2} eta(t)`, where
/// `t = gamma m tau` is reduced and `M = gamma^{-1}`, so the product is only
/// taken well inside the half-plane.
pub fn log_eta_image(p: Image) -> Result<Approx, NumericError> {
    let z = p.point();
    if z.im.is_nan() || z.im <= 0.0 {
        return Err(NumericError::OutsideSafeRegion { y: z.im });
    }
    let (g, _) = reduce(z);
    let (t, delta) = p.then(g).point_with_error();
    let base = log_eta_direct(t)?;
    let slope = log_eta_slope(t);
    if g == [[1, 0], [0, 1]] {
        return Ok(Approx { value: base.value, error: base.error + delta * slope });
    }
    let [[a, b], [c, d]] = g;
    let m = [[d, -b], [-c, a]];
    let k = eta_multiplier(m)?;
    let ct_d = t * m[1][0] as f64 + m[1][1] as f64;
    let half_log = ct_d.ln() / 2.0;
    let value = Complex64::new(0.0, PI * k as f64 / 12.0) + half_log + base.value;
    let error = base.error
        + delta * (slope + 0.5 * m[1][0].unsigned_abs() as f64 / ct_d.norm())
        + 4.0 * EPS * (half_log.norm() + base.value.norm() + PI * k.unsigned_abs() as f64 / 12.0);
    Ok(Approx { value, error })
}

pub fn log_eta(z: Complex64) -> Result<Approx, NumericError> {
    log_eta_image(Image::of(z))
}

/// Truncated product `q^{1/24} prod_{n <= terms} (1 - q^n)`. The first
/// dropped factor must be within `1e-16` of one.
pub fn eval_eta(tau: Complex64, terms: usize) -> Result<Approx, NumericError> {
    let r = (-2.0 * PI * tau.im).exp();
    let dropped = r.powi(terms as i32 + 1);
    if tau.im <= 0.0 || dropped.is_nan() || dropped >= 1e-16 {
        let needed = ((1e-16f64).ln() / r.ln()).ceil() as usize;
        return Err(NumericError::ConvergenceBudgetExceeded { needed, cap: terms });
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut value = (two_pi_i * tau / 24.0).exp();
    for n in 1..=terms {
        value *= Complex64::new(1.0, 0.0) - (two_pi_i * tau * n as f64).exp();
    }
    let tail = dropped / (1.0 - r);
    Ok(Approx { value, error: value.norm() * (tail + 4.0 * EPS * terms as f64) })
}

/// `log prod eta(d z)^r` at `z = p`.
pub fn log_eta_quotient(factors: &[(u64, i64)], p: Image) -> Result<Approx, NumericError> {
    let mut acc = Approx::exact(Complex64::zero());
    for &(d, r) in factors {
        let l = log_eta_image(p.then([[d as i64, 0], [0, 1]]))?;
        acc = Approx { value: acc.value + l.value * r as f64, error: acc.error + l.error * r.unsigned_abs() as f64 };
    }
    Ok(acc)
}

pub fn eval_eta_quotient_at(factors: &[(u64, i64)], p: Image) -> Result<Approx, NumericError> {
    Ok(log_eta_quotient(factors, p)?.exp())
}

pub fn eval_eta_quotient(factors: &[(u64, i64)], z: Complex64) -> Result<Approx, NumericError> {
    eval_eta_quotient_at(factors, Image::of(z))
}

/// `(ln |c|, sign)` for integers too large for `f64`.
fn ln_abs(c: &BigInt) -> (f64, f64) {
    let sign = if c.sign() == Sign::Minus { -1.0 } else { 1.0 };
    let bits = c.bits();
    let ln = if bits < 1000 {
        c.to_f64().unwrap().abs().ln()
    } else {
        let shift = bits - 64;
        let top: BigInt = c.magnitude().clone().into();
        ((top >> shift).to_f64().unwrap()).ln() + shift as f64 * LN_2
    };
    (ln, sign)
}

fn ln_abs_rational(c: &BigRational) -> (f64, f64) {
    let (n, s) = ln_abs(c.numer());
    let (d, t) = ln_abs(c.denom());
    (n - d, s * t)
}

/// `sum c_n e^{2 pi i (n + s/24) z}` over the listed coefficients. The tail
/// beyond them is estimated as `16 M / (1 - |q|)` with `M` the largest of
/// the last 16 terms; `TailTooLarge` when that exceeds `limit` relative to
/// the sum.
pub fn eval_terms(
    terms: impl Iterator<Item = (i64, (f64, f64))>,
    shift_24: i64,
    z: Complex64,
    limit: f64,
) -> Result<Approx, NumericError> {
    let two_pi = 2.0 * PI;
    let mut sum = Complex64::zero();
    let mut abs_sum = 0.0;
    let mut last: Vec<f64> = Vec::new();
    let mut count = 0usize;
    for (n, (ln_c, sign)) in terms {
        count += 1;
        let e = n as f64 + shift_24 as f64 / 24.0;
        let mag = if ln_c == f64::NEG_INFINITY { 0.0 } else { (ln_c - two_pi * e * z.im).exp() };
        let phase = two_pi * e * z.re;
        let t = Complex64::from_polar(mag, phase) * sign;
        sum += t;
        abs_sum += mag;
        last.push(mag);
        if last.len() > 16 {
            last.remove(0);
        }
    }
    let r = (-two_pi * z.im).exp();
    let m = last.iter().cloned().fold(0.0, f64::max);
    let tail = 16.0 * m / (1.0 - r);
    let scale = sum.norm().max(f64::MIN_POSITIVE);
    if count == 0 || tail > limit * scale {
        return Err(NumericError::TailTooLarge { tail: tail / scale, limit });
    }
    Ok(Approx { value: sum, error: tail + 4.0 * EPS * abs_sum * (count as f64).sqrt() })
}

/// A known q-series (integral or rational) evaluated at `z`.
pub fn eval_series(s: &QSeries, z: Complex64, limit: f64) -> Result<Approx, NumericError> {
    let terms = s.terms().map(|(n, c)| {
        if c.is_zero() {
            (n, (f64::NEG_INFINITY, 1.0))
        } else {
            (n, ln_abs_rational(&c))
        }
    });
    eval_terms(terms, 0, z, limit)
}

/// `c psi_{4,beta}(0..n)` for all three betas, as log-magnitudes.
#[derive(Debug, Clone)]
pub struct F4Supply {
    pub terms: usize,
    psi: [Vec<(f64, f64)>; 3],
}

impl F4Supply {
    pub fn new(n: usize) -> Result<Self, NumericError> {
        let conv = |v: &[BigInt]| -> Vec<(f64, f64)> {
            v.iter().map(|c| if c.is_zero() { (f64::NEG_INFINITY, 1.0) } else { ln_abs(c) }).collect()
        };
        let psi1 = cpsi41_coefficients(n);
        let (psi0, psi2) = cpsi40_42_coefficients(n)?;
        Ok(F4Supply { terms: n, psi: [conv(&psi0.values), conv(&psi1.values), conv(&psi2.values)] })
    }
}

/// `f_{4,beta}(z) = q^{1/3 - beta^2/8} sum c psi_{4,beta}(n) q^n`.
pub fn eval_f4beta(beta: u32, z: Complex64, supply: &F4Supply, limit: f64) -> Result<Approx, NumericError> {
    if beta > 2 {
        return Err(NumericError::InvalidBeta(beta));
    }
    let shift_24 = 8 - 3 * (beta * beta) as i64;
    let coeffs = &supply.psi[beta as usize];
    eval_terms(coeffs.iter().enumerate().map(|(n, &c)| (n as i64, c)), shift_24, z, limit)
}

/// `(U_m f)(p) = (1/m) sum_{l < m} f((p + l)/m)`.
pub fn u_conjugates(
    m: u64,
    p: Image,
    f: &dyn Fn(Image) -> Result<Approx, NumericError>,
) -> Result<Approx, NumericError> {
    let mut acc = Approx::exact(Complex64::zero());
    for l in 0..m {
        acc = acc.add(f(p.then([[1, l as i64], [0, m as i64]]))?);
    }
    Ok(acc.scale(Complex64::new(1.0 / m as f64, 0.0)))
}

/// `(a z + b) / (c z + d)`.
pub fn mobius(m: [[i64; 2]; 2], z: Complex64) -> Complex64 {
    let [[a, b], [c, d]] = m.map(|r| r.map(|x| x as f64));
    (z * a + b) / (z * c + d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_at_i() {
        // Gamma(1/4) / (2 pi^{3/4})
        let gamma_quarter = 3.625_609_908_221_908;
        let want = gamma_quarter / (2.0 * PI.powf(0.75));
        let got = log_eta(Complex64::new(0.0, 1.0)).unwrap().exp();
        assert!((got.value.re - want).abs() < 1e-14 && got.value.im.abs() < 1e-14);
        let direct = eval_eta(Complex64::new(0.0, 1.0), 40).unwrap();
        assert!((direct.value - got.value).norm() < 1e-14);
        assert!(eval_eta(Complex64::new(0.0, 1.0), 2).is_err());
    }

    #[test]
    fn closed_form_tail_matches_long_product() {
        // Im small enough that the split happens early
        for z in [Complex64::new(0.3, 0.01), Complex64::new(-0.41, 0.003)] {
            let fast = log_eta_direct(z).unwrap();
            let slow = eval_eta(z, 3000).unwrap();
            let rel = (fast.exp().value - slow.value).norm() / slow.value.norm();
            assert!(rel < 1e-9, "{z} {rel}");
            assert!(fast.error < 1e-9);
        }
    }

    #[test]
    fn translation_and_inversion() {
        for z in [Complex64::new(0.17, 0.83), Complex64::new(-0.4, 1.3)] {
            let e = log_eta_direct(z).unwrap().exp().value;
            let shifted = log_eta_direct(z + 1.0).unwrap().exp().value;
            let want = Complex64::from_polar(1.0, PI / 12.0);
            assert!((shifted / e - want).norm() < 1e-13);
            let inv = log_eta_direct(-z.inv()).unwrap().exp().value;
            let ratio = inv / ((-Complex64::i() * z).sqrt() * e);
            assert!((ratio - 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn reduction_agrees_with_product() {
        for z in [Complex64::new(0.3, 0.01), Complex64::new(-0.41, 0.003), Complex64::new(25.0 / 2401.0, 2e-5)] {
            let (g, t) = reduce(z);
            assert!(t.im >= 0.86 && t.re.abs() <= 0.5 && t.norm() >= 1.0);
            assert_eq!(g[0][0] * g[1][1] - g[0][1] * g[1][0], 1);
            let fast = log_eta(z).unwrap();
            let slow = log_eta_direct(z).unwrap();
            let rel = (fast.exp().value - slow.exp().value).norm() / slow.exp().value.norm();
            assert!(rel < 1e-9 && fast.error < slow.error, "{z} {rel} {} {}", fast.error, slow.error);
        }
    }

    #[test]
    fn huge_coefficients_do_not_overflow() {
        let big = BigInt::from(10).pow(400u32);
        let (ln, s) = ln_abs(&-big);
        assert!((ln - 400.0 * 10f64.ln()).abs() < 1e-9 && s == -1.0);
    }

    #[test]
    fn series_tail_guard() {
        let s = QSeries::from_i64s(0, &[1, 1, 1, 1], 4);
        assert!(matches!(
            eval_series(&s, Complex64::new(0.0, 0.05), 1e-12),
            Err(NumericError::TailTooLarge { .. })
        ));
        let long = QSeries::from_i64s(0, &[1; 40], 40);
        let v = eval_series(&long, Complex64::new(0.0, 2.0), 1e-12).unwrap();
        let r = (-4.0 * PI).exp();
        assert!((v.value.re - (1.0 - r.powi(40)) / (1.0 - r)).abs() < 1e-15);
    }
}

//! Exact truncated Laurent series in `q`.
//!
//! A [`QSeries`] stores a dense window of coefficients `[lowest, precision)`
//! as integer numerators over one shared positive denominator. Coefficients
//! below `lowest` are known to be zero; coefficients at or above `precision`
//! are unknown. Every operation propagates `precision` pessimistically, so a
//! result never claims a coefficient its inputs could not determine.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::par;

/// Products whose output window is at least this long are computed with one
/// task per output coefficient.
const PAR_CONVOLUTION_THRESHOLD: usize = 192;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SeriesError {
    #[error("leading coefficient is zero (series vanishes on its known window)")]
    ZeroLeadingCoefficient,
    #[error("coefficient of q^{exponent} is not an integer: {value}")]
    NotIntegral { exponent: i64, value: BigRational },
    #[error("exponent {exponent} is outside the known window (precision {precision})")]
    UnknownCoefficient { exponent: i64, precision: i64 },
    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

/// 7-adic (or p-adic) valuation. `Infinite` is the valuation of zero and
/// compares above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// `true` when the valuation is at least `floor`.
    pub fn at_least(self, floor: i64) -> bool {
        self >= Valuation::Finite(floor)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// Exponent of the prime `p` in a nonzero integer; `Infinite` for zero.
pub fn int_valuation(n: &BigInt, p: u64) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinite;
    }
    let p_big = BigInt::from(p);
    // strip p^8 at a time first; valuations in this crate reach the hundreds
    let p8 = p_big.pow(8);
    let mut v = 0i64;
    let mut m = n.abs();
    loop {
        let (q, r) = m.div_rem(&p8);
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 8;
    }
    loop {
        let (q, r) = m.div_rem(&p_big);
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 1;
    }
    Valuation::Finite(v)
}

/// p-adic valuation of an exact rational.
pub fn p_adic_valuation(c: &BigRational, p: u64) -> Valuation {
    if c.is_zero() {
        return Valuation::Infinite;
    }
    let num = int_valuation(c.numer(), p).finite().unwrap_or(0);
    let den = int_valuation(c.denom(), p).finite().unwrap_or(0);
    Valuation::Finite(num - den)
}

pub fn seven_adic_valuation(c: &BigRational) -> Valuation {
    p_adic_valuation(c, 7)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    lowest: i64,
    nums: Vec<BigInt>,
    den: BigInt,
    precision: i64,
}

impl QSeries {
    /// Builds a series from integer coefficients starting at `lowest`.
    /// Missing coefficients up to `precision` are zero; extra ones are dropped.
    pub fn from_integers(lowest: i64, coeffs: Vec<BigInt>, precision: i64) -> Self {
        Self::from_parts(lowest, coeffs, BigInt::one(), precision)
    }

    pub fn from_i64s(lowest: i64, coeffs: &[i64], precision: i64) -> Self {
        Self::from_integers(lowest, coeffs.iter().map(|&c| BigInt::from(c)).collect(), precision)
    }

    pub fn from_rationals(lowest: i64, coeffs: &[BigRational], precision: i64) -> Self {
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Self::from_parts(lowest, nums, den, precision)
    }

    /// Canonicalizes: window padded/truncated, leading zeros trimmed,
    /// denominator positive and coprime to the numerators.
    pub(crate) fn from_parts(lowest: i64, mut nums: Vec<BigInt>, mut den: BigInt, precision: i64) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let len = (precision - lowest).max(0) as usize;
        nums.resize(len, BigInt::zero());
        let lead = nums.iter().position(|c| !c.is_zero()).unwrap_or(len);
        if lead == len {
            return QSeries::zero(precision);
        }
        if lead > 0 {
            nums.drain(..lead);
        }
        if den.is_negative() {
            den = -den;
            nums.iter_mut().for_each(|c| *c = -&*c);
        }
        if !den.is_one() {
            let mut g = den.clone();
            for c in &nums {
                if g.is_one() {
                    break;
                }
                if !c.is_zero() {
                    g = g.gcd(c);
                }
            }
            if !g.is_one() {
                nums.iter_mut().for_each(|c| *c = &*c / &g);
                den = &den / &g;
            }
        }
        QSeries {
            lowest: lowest + lead as i64,
            nums,
            den,
            precision,
        }
    }

    /// The zero series `O(q^precision)`.
    pub fn zero(precision: i64) -> Self {
        QSeries {
            lowest: precision,
            nums: Vec::new(),
            den: BigInt::one(),
            precision,
        }
    }

    pub fn one(precision: i64) -> Self {
        Self::monomial(BigRational::one(), 0, precision)
    }

    pub fn monomial(c: BigRational, exponent: i64, precision: i64) -> Self {
        if exponent >= precision {
            return Self::zero(precision);
        }
        Self::from_rationals(exponent, &[c], precision)
    }

    /// Exponent of the first stored (nonzero) coefficient; equals
    /// `precision` for a series that vanishes on its window.
    pub fn lowest_exponent(&self) -> i64 {
        self.lowest
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// Order of the series if it is nonzero on its known window.
    pub fn order(&self) -> Option<i64> {
        (!self.nums.is_empty()).then_some(self.lowest)
    }

    pub fn is_zero(&self) -> bool {
        self.nums.is_empty()
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Coefficient of `q^exponent`, `None` when beyond the known window.
    pub fn coefficient(&self, exponent: i64) -> Option<BigRational> {
        if exponent >= self.precision {
            return None;
        }
        if exponent < self.lowest {
            return Some(BigRational::zero());
        }
        let c = &self.nums[(exponent - self.lowest) as usize];
        Some(BigRational::new(c.clone(), self.den.clone()))
    }

    /// Integer coefficient of `q^exponent`; errors if unknown or fractional.
    pub fn int_coefficient(&self, exponent: i64) -> Result<BigInt, SeriesError> {
        if exponent >= self.precision {
            return Err(SeriesError::UnknownCoefficient {
                exponent,
                precision: self.precision,
            });
        }
        if exponent < self.lowest {
            return Ok(BigInt::zero());
        }
        let c = &self.nums[(exponent - self.lowest) as usize];
        if self.den.is_one() {
            Ok(c.clone())
        } else {
            let value = BigRational::new(c.clone(), self.den.clone());
            if value.is_integer() {
                Ok(value.to_integer())
            } else {
                Err(SeriesError::NotIntegral { exponent, value })
            }
        }
    }

    /// Integer coefficients on `[from, precision)`; errors on any fractional one.
    pub fn integer_window(&self, from: i64) -> Result<Vec<BigInt>, SeriesError> {
        (from..self.precision).map(|e| self.int_coefficient(e)).collect()
    }

    /// Asserts integrality (pipelines whose objects are known to be integral).
    pub fn expect_integral(&self) -> Result<&Self, SeriesError> {
        if self.den.is_one() {
            return Ok(self);
        }
        let i = self.nums.iter().position(|c| !c.is_multiple_of(&self.den)).unwrap();
        let exponent = self.lowest + i as i64;
        Err(SeriesError::NotIntegral {
            exponent,
            value: self.coefficient(exponent).unwrap(),
        })
    }

    /// Numerators over the common denominator, indexed from `lowest_exponent`.
    pub fn numerators(&self) -> &[BigInt] {
        &self.nums
    }

    /// Iterator over `(exponent, coefficient)` for every stored coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (i64, BigRational)> + '_ {
        self.nums
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.lowest + i as i64, BigRational::new(c.clone(), self.den.clone())))
    }

    pub fn truncate(&self, precision: i64) -> Self {
        if precision >= self.precision {
            return self.clone();
        }
        Self::from_parts(self.lowest, self.nums.clone(), self.den.clone(), precision)
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        QSeries {
            lowest: self.lowest + k,
            nums: self.nums.clone(),
            den: self.den.clone(),
            precision: self.precision + k,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.precision);
        }
        let nums = self.nums.iter().map(|x| x * c.numer()).collect();
        Self::from_parts(self.lowest, nums, &self.den * c.denom(), self.precision)
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(c.clone()))
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.combine(other, true)
    }

    fn combine(&self, other: &QSeries, subtract: bool) -> QSeries {
        let precision = self.precision.min(other.precision);
        let lowest = self.lowest.min(other.lowest).min(precision);
        let len = (precision - lowest) as usize;
        let den = self.den.lcm(&other.den);
        let fa = &den / &self.den;
        let fb = &den / &other.den;
        let mut nums = vec![BigInt::zero(); len];
        for (i, c) in self.nums.iter().enumerate() {
            let e = self.lowest + i as i64;
            if e >= precision {
                break;
            }
            nums[(e - lowest) as usize] = c * &fa;
        }
        for (i, c) in other.nums.iter().enumerate() {
            let e = other.lowest + i as i64;
            if e >= precision {
                break;
            }
            let slot = &mut nums[(e - lowest) as usize];
            if subtract {
                *slot -= c * &fb;
            } else {
                *slot += c * &fb;
            }
        }
        Self::from_parts(lowest, nums, den, precision)
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            lowest: self.lowest,
            nums: self.nums.iter().map(|c| -c).collect(),
            den: self.den.clone(),
            precision: self.precision,
        }
    }

    /// Cauchy product. Precision is
    /// `min(a.precision + b.order, b.precision + a.order)`.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        if self.is_zero() || other.is_zero() {
            let precision = (self.precision + other.lowest).min(other.precision + self.lowest);
            return Self::zero(precision);
        }
        let precision = (self.precision + other.lowest).min(other.precision + self.lowest);
        let lowest = self.lowest + other.lowest;
        let len = (precision - lowest).max(0) as usize;
        let nums = convolve(&self.nums, &other.nums, len);
        Self::from_parts(lowest, nums, &self.den * &other.den, precision)
    }

    /// Multiplicative inverse; the result has order `-self.order`.
    pub fn invert(&self) -> Result<QSeries, SeriesError> {
        if self.is_zero() {
            return Err(SeriesError::ZeroLeadingCoefficient);
        }
        let v = self.lowest;
        let len = self.nums.len();
        let s = &self.nums;
        let s0 = &s[0];
        // B_n = s0^(n+1) * b_n with b the inverse of s; B_n = -sum_{k>=1} s_k s0^(k-1) B_{n-k}
        let mut s0_pows = Vec::with_capacity(len);
        s0_pows.push(BigInt::one());
        for k in 1..len {
            let next = &s0_pows[k - 1] * s0;
            s0_pows.push(next);
        }
        let unit = s0.abs().is_one();
        let mut b: Vec<BigInt> = Vec::with_capacity(len);
        b.push(BigInt::one());
        for n in 1..len {
            let mut acc = BigInt::zero();
            for k in 1..=n {
                if s[k].is_zero() {
                    continue;
                }
                if unit {
                    acc += &s[k] * &b[n - k];
                } else {
                    acc += &s[k] * &s0_pows[k - 1] * &b[n - k];
                }
            }
            if unit {
                // s0 = +-1: b_n = -s0 * sum
                if s0.is_negative() {
                    b.push(acc);
                } else {
                    b.push(-acc);
                }
            } else {
                b.push(-acc);
            }
        }
        // coefficient n = den * B_n / s0^(n+1)
        let (nums, den) = if unit {
            let sign_fix = s0.is_negative();
            let nums = b
                .into_iter()
                .map(|x| {
                    let x = x * &self.den;
                    if sign_fix {
                        -x
                    } else {
                        x
                    }
                })
                .collect();
            (nums, BigInt::one())
        } else {
            let big = &s0_pows[len - 1] * s0;
            let nums = b
                .into_iter()
                .enumerate()
                .map(|(n, x)| x * &self.den * &s0_pows[len - 1 - n])
                .collect();
            (nums, big)
        };
        Ok(Self::from_parts(-v, nums, den, -v + len as i64))
    }

    /// `self^k`; negative `k` goes through [`QSeries::invert`].
    pub fn pow(&self, k: i64) -> Result<QSeries, SeriesError> {
        let rel = self.precision - self.lowest;
        if k == 0 {
            return Ok(QSeries::one(rel.max(1)));
        }
        let base = if k < 0 { self.invert()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut result: Option<QSeries> = None;
        let mut square = base;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => square.clone(),
                    Some(r) => r.mul(&square),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            square = square.mul(&square);
        }
        Ok(result.unwrap())
    }

    /// The series `a(q^m)`.
    pub fn substitute(&self, m: u64) -> QSeries {
        assert!(m >= 1, "substitute needs m >= 1");
        let m = m as i64;
        if self.is_zero() {
            return Self::zero(self.precision * m);
        }
        let len = ((self.precision - self.lowest) * m) as usize;
        let mut nums = vec![BigInt::zero(); len];
        for (i, c) in self.nums.iter().enumerate() {
            nums[i * m as usize] = c.clone();
        }
        Self::from_parts(self.lowest * m, nums, self.den.clone(), self.precision * m)
    }

    /// Coefficient-level `U_m`: `a(n) -> a(mn)`.
    pub fn u_operator(&self, m: u64) -> QSeries {
        assert!(m >= 1, "U_m needs m >= 1");
        let m = m as i64;
        let precision = ceil_div(self.precision, m);
        if self.is_zero() {
            return Self::zero(precision);
        }
        let lowest = ceil_div(self.lowest, m);
        let nums = (lowest..precision)
            .map(|n| self.nums[(m * n - self.lowest) as usize].clone())
            .collect();
        Self::from_parts(lowest, nums, self.den.clone(), precision)
    }

    /// First exponent where `self` and `other` differ on their common window.
    pub fn first_difference(&self, other: &QSeries) -> Option<(i64, BigRational, BigRational)> {
        let precision = self.precision.min(other.precision);
        let start = self.lowest.min(other.lowest);
        (start..precision).find_map(|e| {
            let a = self.coefficient(e).unwrap();
            let b = other.coefficient(e).unwrap();
            (a != b).then_some((e, a, b))
        })
    }

    /// Minimum 7-adic valuation over the known window.
    pub fn min_valuation(&self, p: u64) -> Valuation {
        let den_v = int_valuation(&self.den, p).finite().unwrap_or(0);
        self.nums
            .iter()
            .map(|c| match int_valuation(c, p) {
                Valuation::Finite(v) => Valuation::Finite(v - den_v),
                Valuation::Infinite => Valuation::Infinite,
            })
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// CSV dump: a `# precision=N` header, then `exponent,numerator,denominator`
    /// for every exponent of the window in ascending order.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# precision={}\n", self.precision);
        for (e, c) in self.terms() {
            out.push_str(&format!("{},{},{}\n", e, c.numer(), c.denom()));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<QSeries, SeriesError> {
        let mut precision = None;
        let mut terms: Vec<(i64, BigRational)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(p) = rest.trim().strip_prefix("precision=") {
                    precision = Some(p.trim().parse::<i64>().map_err(|e| SeriesError::Csv {
                        line: i + 1,
                        msg: e.to_string(),
                    })?);
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(SeriesError::Csv {
                    line: i + 1,
                    msg: format!("expected 3 fields, found {}", fields.len()),
                });
            }
            let bad = |msg: String| SeriesError::Csv { line: i + 1, msg };
            let e: i64 = fields[0].trim().parse().map_err(|x: std::num::ParseIntError| bad(x.to_string()))?;
            let n: BigInt = fields[1].trim().parse().map_err(|_| bad("bad numerator".into()))?;
            let d: BigInt = fields[2].trim().parse().map_err(|_| bad("bad denominator".into()))?;
            if d.is_zero() {
                return Err(bad("zero denominator".into()));
            }
            if let Some((last, _)) = terms.last() {
                if e <= *last {
                    return Err(bad("exponents must ascend".into()));
                }
            }
            terms.push((e, BigRational::new(n, d)));
        }
        let precision = precision.ok_or(SeriesError::Csv {
            line: 0,
            msg: "missing '# precision=N' header".into(),
        })?;
        let Some(lowest) = terms.first().map(|(e, _)| *e) else {
            return Ok(QSeries::zero(precision));
        };
        let mut dense = vec![BigRational::zero(); (precision - lowest).max(0) as usize];
        for (e, c) in terms {
            if e >= precision {
                return Err(SeriesError::Csv {
                    line: 0,
                    msg: format!("exponent {e} beyond precision {precision}"),
                });
            }
            dense[(e - lowest) as usize] = c;
        }
        Ok(QSeries::from_rationals(lowest, &dense, precision))
    }
}

pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// Truncated integer convolution: `out[k] = sum a[i] b[k-i]` for `k < len`.
fn convolve(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let coeff = |k: usize| {
        let mut acc = BigInt::zero();
        let lo = k.saturating_sub(b.len().saturating_sub(1));
        let hi = k.min(a.len().saturating_sub(1));
        if lo <= hi {
            for i in lo..=hi {
                let x = &a[i];
                if x.is_zero() {
                    continue;
                }
                let y = &b[k - i];
                if y.is_zero() {
                    continue;
                }
                acc += x * y;
            }
        }
        acc
    };
    if len >= PAR_CONVOLUTION_THRESHOLD {
        par::map_range(0..len, coeff)
    } else {
        (0..len).map(coeff).collect()
    }
}

/// Nonzero terms `(exponent, sign)` of `prod_{j>=1} (1 - q^{delta j})` below
/// `limit`, excluding the constant term.
pub(crate) fn pentagonal_terms(limit: usize, delta: usize) -> Vec<(usize, bool)> {
    let mut terms = Vec::new();
    let mut k: i64 = 1;
    loop {
        let e1 = (k * (3 * k - 1) / 2) as usize * delta;
        let e2 = (k * (3 * k + 1) / 2) as usize * delta;
        if e1 >= limit {
            break;
        }
        let negative = k % 2 == 1;
        terms.push((e1, negative));
        if e2 < limit {
            terms.push((e2, negative));
        }
        k += 1;
    }
    terms.sort_unstable();
    terms
}

/// In place: `f <- f * prod_j (1 - q^{delta j})`.
pub(crate) fn mul_euler_in_place(f: &mut [BigInt], delta: usize) {
    let terms = pentagonal_terms(f.len(), delta);
    for n in (1..f.len()).rev() {
        let (lo, hi) = f.split_at_mut(n);
        let target = &mut hi[0];
        for &(e, negative) in &terms {
            if e > n {
                break;
            }
            let src = &lo[n - e];
            if src.is_zero() {
                continue;
            }
            if negative {
                *target -= src;
            } else {
                *target += src;
            }
        }
    }
}

/// In place: `f <- f / prod_j (1 - q^{delta j})`.
pub(crate) fn div_euler_in_place(f: &mut [BigInt], delta: usize) {
    let terms = pentagonal_terms(f.len(), delta);
    for n in 1..f.len() {
        let (lo, hi) = f.split_at_mut(n);
        let target = &mut hi[0];
        for &(e, negative) in &terms {
            if e > n {
                break;
            }
            let src = &lo[n - e];
            if src.is_zero() {
                continue;
            }
            // g[n] = f[n] - sum s_e g[n-e]
            if negative {
                *target += src;
            } else {
                *target -= src;
            }
        }
    }
}

/// `prod_{j>=1} (1 - q^j)` to precision `n` via the pentagonal number theorem.
pub fn euler_product(n: usize) -> QSeries {
    assert!(n >= 1, "euler_product needs N >= 1");
    let mut coeffs = vec![BigInt::zero(); n];
    coeffs[0] = BigInt::one();
    for (e, negative) in pentagonal_terms(n, 1) {
        coeffs[e] = if negative { -BigInt::one() } else { BigInt::one() };
    }
    QSeries::from_integers(0, coeffs, n as i64)
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        QSeries::add(self, rhs)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        QSeries::sub(self, rhs)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        QSeries::mul(self, rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries::neg(self)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms().filter(|(_, c)| !c.is_zero()).take(12) {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match e {
                0 => write!(f, "{a}")?,
                1 if a.is_one() => write!(f, "q")?,
                1 => write!(f, "{a}*q")?,
                _ if a.is_one() => write!(f, "q^{e}")?,
                _ => write!(f, "{a}*q^{e}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.precision)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(lowest: i64, c: &[i64], p: i64) -> QSeries {
        QSeries::from_i64s(lowest, c, p)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Partition numbers by the standard dynamic program over part sizes.
    fn partition_counts(n: usize) -> Vec<i64> {
        let mut p = vec![0i64; n];
        p[0] = 1;
        for part in 1..n {
            for m in part..n {
                p[m] += p[m - part];
            }
        }
        p
    }

    #[test]
    fn add_cancels_and_identity() {
        let a = s(1, &[1, 1], 10);
        let b = s(1, &[-1], 10);
        assert_eq!(&a + &b, s(2, &[1], 10));
        assert_eq!(&a + &QSeries::zero(10), a);
        let c = &s(0, &[1, -1], 10) + &s(1, &[1, 1], 10);
        assert_eq!(c, s(0, &[1, 0, 1], 10));
    }

    #[test]
    fn mul_geometric_and_monomials() {
        let n = 20;
        let one_minus_q = s(0, &[1, -1], n);
        let geo = s(0, &vec![1; n as usize], n);
        assert_eq!(&one_minus_q * &geo, QSeries::one(n));
        let a = QSeries::monomial(BigRational::one(), -10, 5);
        let b = QSeries::monomial(BigRational::one(), 10, 25);
        let prod = &a * &b;
        assert_eq!(prod.coefficient(0), Some(BigRational::one()));
        assert_eq!(prod.precision(), 15);
    }

    #[test]
    fn mul_precision_rule() {
        let a = s(-2, &[1, 3], 7);
        let b = s(3, &[2], 9);
        let c = &a * &b;
        assert_eq!(c.precision(), 9 - 2);
        assert_eq!(c.lowest_exponent(), 1);
    }

    #[test]
    fn invert_examples() {
        let inv = s(0, &[1, -1], 12).invert().unwrap();
        assert_eq!(inv, s(0, &[1; 12], 12));
        let q = s(1, &[1], 10);
        let qi = q.invert().unwrap();
        assert_eq!(qi.lowest_exponent(), -1);
        assert_eq!(qi.coefficient(-1), Some(BigRational::one()));
        // partition generating function from the inverse Euler product
        let p = euler_product(50).invert().unwrap();
        let oracle = partition_counts(50);
        for (n, &pn) in oracle.iter().enumerate() {
            assert_eq!(p.int_coefficient(n as i64).unwrap(), BigInt::from(pn), "p({n})");
        }
    }

    #[test]
    fn invert_non_unit_leading() {
        let a = s(0, &[2, 1, 5], 8);
        let b = a.invert().unwrap();
        let prod = &a * &b;
        assert_eq!(prod, QSeries::one(8));
        assert_eq!(b.coefficient(0), Some(rat(1, 2)));
    }

    #[test]
    fn invert_zero_fails() {
        assert_eq!(QSeries::zero(5).invert(), Err(SeriesError::ZeroLeadingCoefficient));
        assert_eq!(s(0, &[0, 0], 2).invert(), Err(SeriesError::ZeroLeadingCoefficient));
    }

    #[test]
    fn pow_examples() {
        let a = s(0, &[1, 2, 3], 10);
        assert_eq!(a.pow(0).unwrap(), QSeries::one(10));
        assert_eq!(a.pow(1).unwrap(), a);
        // (q;q)^{-4} by iterated multiplication with the inverse
        let e = euler_product(30);
        let inv = e.invert().unwrap();
        let oracle = (0..4).fold(QSeries::one(30), |acc, _| &acc * &inv);
        let got = e.pow(-4).unwrap();
        assert_eq!(got, oracle);
        assert_eq!(got.int_coefficient(1).unwrap(), BigInt::from(4));
        assert_eq!(got.int_coefficient(2).unwrap(), BigInt::from(14));
    }

    #[test]
    fn substitute_examples() {
        let a = s(0, &[1, 1], 10);
        let b = a.substitute(2);
        assert_eq!(b, s(0, &[1, 0, 1], 20));
        assert_eq!(a.substitute(1), a);
        // euler_product(20)(q^7) against the pentagonal exponents scaled by 7
        let e7 = euler_product(20).substitute(7);
        for e in 0..140 {
            let expected = pentagonal_terms(140, 7)
                .iter()
                .find(|(x, _)| *x == e as usize)
                .map(|&(_, neg)| if neg { -1 } else { 1 })
                .unwrap_or(if e == 0 { 1 } else { 0 });
            assert_eq!(e7.int_coefficient(e).unwrap(), BigInt::from(expected));
        }
    }

    #[test]
    fn euler_product_examples() {
        assert_eq!(euler_product(8), s(0, &[1, -1, -1, 0, 0, 1, 0, 1], 8));
        assert_eq!(euler_product(1), QSeries::one(1));
        assert_eq!(euler_product(20).int_coefficient(12).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn euler_product_matches_naive() {
        let n = 200usize;
        let mut naive = QSeries::one(n as i64);
        for j in 1..n {
            let mut c = vec![0i64; j + 1];
            c[0] = 1;
            c[j] = -1;
            naive = &naive * &s(0, &c, n as i64);
        }
        assert_eq!(euler_product(n), naive);
    }

    #[test]
    fn u_operator_examples() {
        assert_eq!(QSeries::one(70).u_operator(7), QSeries::one(10));
        let a = s(1, &[1, 1, 1, 1], 5);
        assert_eq!(a.u_operator(2), s(1, &[1, 1], 3));
    }

    #[test]
    fn sparse_euler_helpers_match_dense() {
        let n = 60;
        let mut f = vec![BigInt::zero(); n];
        f[0] = BigInt::one();
        mul_euler_in_place(&mut f, 3);
        mul_euler_in_place(&mut f, 1);
        div_euler_in_place(&mut f, 2);
        let e = euler_product(n);
        let dense = &(&e.substitute(3).truncate(n as i64) * &e) * &e.substitute(2).truncate(n as i64).invert().unwrap();
        assert_eq!(QSeries::from_integers(0, f, n as i64), dense.truncate(n as i64));
    }

    #[test]
    fn valuations() {
        assert_eq!(seven_adic_valuation(&rat(784, 1)), Valuation::Finite(2));
        assert_eq!(seven_adic_valuation(&rat(0, 1)), Valuation::Infinite);
        assert_eq!(seven_adic_valuation(&rat(1, 7)), Valuation::Finite(-1));
        assert_eq!(seven_adic_valuation(&rat(5 * 343, 49 * 2)), Valuation::Finite(1));
        let big = BigInt::from(7).pow(300) * 3;
        assert_eq!(int_valuation(&big, 7), Valuation::Finite(300));
    }

    #[test]
    fn csv_round_trip() {
        let a = QSeries::from_rationals(-2, &[rat(1, 3), rat(0, 1), rat(-5, 2)], 4);
        let text = a.to_csv();
        assert!(text.starts_with("# precision=4\n-2,1,3\n"));
        assert_eq!(QSeries::from_csv(&text).unwrap(), a);
        assert!(QSeries::from_csv("1,2,3\n").is_err());
    }
}

//! Laurent polynomials in `t` with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::qseries::{seven_adic_valuation, Valuation};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: BigRational, degree: i64) -> Self {
        let mut p = Self::zero();
        p.set(degree, c);
        p
    }

    pub fn from_ints(terms: &[(i64, i64)]) -> Self {
        let mut p = Self::zero();
        for &(n, c) in terms {
            p.add_term(n, &BigRational::from_integer(c.into()));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, degree: i64) -> BigRational {
        self.terms.get(&degree).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn set(&mut self, degree: i64, c: BigRational) {
        if c.is_zero() {
            self.terms.remove(&degree);
        } else {
            self.terms.insert(degree, c);
        }
    }

    pub fn add_term(&mut self, degree: i64, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(degree).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&degree);
        }
    }

    /// Nonzero terms in ascending degree.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> + '_ {
        self.terms.iter().map(|(&n, c)| (n, c))
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (n, c) in other.terms() {
            out.add_term(n, c);
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(&n, c)| (n, -c)).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> LaurentPoly {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(&n, x)| (n, x * c)).collect() }
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(&n, c)| (n + k, c.clone())).collect() }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = Self::zero();
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                out.add_term(a + b, &(x * y));
            }
        }
        out
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &LaurentPoly) -> Option<LaurentPoly> {
        let lead_deg = other.max_degree()?;
        let lead = other.coeff(lead_deg);
        let low = other.min_degree().unwrap();
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(top) = rem.max_degree() {
            if top - lead_deg < rem.min_degree().unwrap() - low {
                return None;
            }
            let c = rem.coeff(top) / &lead;
            let step = other.scale(&c).shift(top - lead_deg);
            quot.add_term(top - lead_deg, &c);
            rem = rem.sub(&step);
        }
        Some(quot)
    }

    /// 7-adic valuation of the coefficient at `degree` (`Infinite` if absent).
    pub fn valuation_at(&self, degree: i64) -> Valuation {
        seven_adic_valuation(&self.coeff(degree))
    }

    /// Parses sums of products such as `-13*t^-1 + 6574 + 423*7^2*t`.
    /// Factors are integers, `b^e` integer powers and `t` or `t^n`.
    pub fn parse(text: &str) -> Result<LaurentPoly, (usize, String)> {
        let bytes = text.as_bytes();
        let mut poly = LaurentPoly::zero();
        let mut i = 0;
        let skip_ws = |i: &mut usize| {
            while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
                *i += 1;
            }
        };
        let read_int = |i: &mut usize| -> Option<BigInt> {
            let start = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            (start < *i).then(|| text[start..*i].parse().unwrap())
        };
        let read_signed = |i: &mut usize| -> Option<i64> {
            let start = *i;
            if *i < bytes.len() && bytes[*i] == b'-' {
                *i += 1;
            }
            let digits = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            (digits < *i).then(|| text[start..*i].parse().unwrap())
        };
        skip_ws(&mut i);
        if i == bytes.len() {
            return Ok(poly);
        }
        let mut first = true;
        loop {
            skip_ws(&mut i);
            let mut negative = false;
            if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                negative = bytes[i] == b'-';
                i += 1;
                skip_ws(&mut i);
            } else if !first {
                return Err((i, "expected '+' or '-'".into()));
            }
            first = false;
            let mut coeff = BigInt::one();
            let mut degree = 0i64;
            loop {
                skip_ws(&mut i);
                if i < bytes.len() && bytes[i] == b't' {
                    i += 1;
                    let mut e = 1;
                    if i < bytes.len() && bytes[i] == b'^' {
                        i += 1;
                        e = read_signed(&mut i).ok_or((i, "expected exponent of t".to_string()))?;
                    }
                    degree += e;
                } else {
                    let base = read_int(&mut i).ok_or((i, "expected integer or 't'".to_string()))?;
                    if i < bytes.len() && bytes[i] == b'^' {
                        i += 1;
                        let e = read_signed(&mut i).ok_or((i, "expected exponent".to_string()))?;
                        if e < 0 {
                            return Err((i, "negative integer exponent".into()));
                        }
                        coeff *= num_traits::pow(base, e as usize);
                    } else {
                        coeff *= base;
                    }
                }
                skip_ws(&mut i);
                if i < bytes.len() && bytes[i] == b'*' {
                    i += 1;
                } else {
                    break;
                }
            }
            if negative {
                coeff = -coeff;
            }
            poly.add_term(degree, &BigRational::from_integer(coeff));
            skip_ws(&mut i);
            if i == bytes.len() {
                break;
            }
        }
        Ok(poly)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (n, c)) in self.terms().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            match (n, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{a}*t")?,
                (_, true) => write!(f, "t^{n}")?,
                (_, false) => write!(f, "{a}*t^{n}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_printed_forms() {
        let p = LaurentPoly::parse("-13*t^-1 + 6574 + 423*7^2*t - 7^4*t^3").unwrap();
        assert_eq!(p, LaurentPoly::from_ints(&[(-1, -13), (0, 6574), (1, 423 * 49), (3, -2401)]));
        assert_eq!(LaurentPoly::parse("").unwrap(), LaurentPoly::zero());
        assert_eq!(LaurentPoly::parse("t").unwrap(), LaurentPoly::from_ints(&[(1, 1)]));
        assert_eq!(LaurentPoly::parse("16*7^2*t").unwrap().coeff(1), BigRational::from_integer(784.into()));
        assert!(LaurentPoly::parse("3 4").is_err());
        assert!(LaurentPoly::parse("3*").is_err());
    }

    #[test]
    fn display_round_trip() {
        let p = LaurentPoly::from_ints(&[(-1, 2), (0, -4), (1, -7), (5, 1)]);
        assert_eq!(p.to_string(), "2*t^-1 - 4 - 7*t + t^5");
        assert_eq!(LaurentPoly::parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn arithmetic() {
        let a = LaurentPoly::from_ints(&[(0, 1), (1, 1)]);
        let b = LaurentPoly::from_ints(&[(0, 1), (1, -1)]);
        let prod = a.mul(&b);
        assert_eq!(prod, LaurentPoly::from_ints(&[(0, 1), (2, -1)]));
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(LaurentPoly::from_ints(&[(0, 1)]).div_exact(&a), None);
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.shift(-2).min_degree(), Some(-2));
        assert_eq!(LaurentPoly::from_ints(&[(3, 98)]).valuation_at(3), Valuation::Finite(2));
    }
}

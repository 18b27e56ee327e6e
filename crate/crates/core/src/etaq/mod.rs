//! Symbolic eta quotients `prod eta(delta tau)^{r_delta}`.

mod atkin;
mod cusps;
mod multiplier;

pub use atkin::{AtkinLehnerImage, AtkinLehnerMatrix};
pub use cusps::{cusp_representatives, valence_bound, Cusp, CuspOrder, CuspOrderTable};
pub use multiplier::{dedekind_sum, eta_multiplier};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::qseries::{div_euler_in_place, mul_euler_in_place, QSeries};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EtaError {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("level {level} does not divide the declared level {declared}")]
    LevelMismatch { level: u64, declared: u64 },
    #[error("eta quotient has weight {numer}/2, expected 0")]
    NonzeroWeight { numer: i64 },
    #[error("q-prefactor {prefactor_24}/24 is not an integer power of q")]
    FractionalPrefactor { prefactor_24: i64 },
    #[error("matrix has determinant {det}, expected 1")]
    NotUnimodular { det: i64 },
    #[error("not an Atkin-Lehner matrix: {0}")]
    InvalidAtkinLehner(String),
}

impl EtaError {
    /// Two-line diagnostic pointing at the offending byte of `input`.
    pub fn caret(&self, input: &str) -> String {
        match self {
            EtaError::Parse { position, message } => {
                format!("{input}\n{}^ {message}", " ".repeat(*position))
            }
            other => other.to_string(),
        }
    }
}

/// `prod eta(delta tau)^{r_delta}` with a declared level. Factor order is
/// kept as written so that the text form round-trips exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaQuotient {
    factors: Vec<(u64, i64)>,
    level: u64,
}

impl EtaQuotient {
    /// Builds a quotient whose declared level is the lcm of its levels.
    pub fn new(factors: &[(u64, i64)]) -> Self {
        let level = factors.iter().fold(1u64, |acc, &(d, _)| acc.lcm(&d));
        Self::with_level(factors, level).expect("lcm level")
    }

    pub fn with_level(factors: &[(u64, i64)], level: u64) -> Result<Self, EtaError> {
        let mut seen = BTreeMap::new();
        for &(d, r) in factors {
            assert!(d >= 1, "eta level must be positive");
            if !level.is_multiple_of(d) {
                return Err(EtaError::LevelMismatch { level: d, declared: level });
            }
            *seen.entry(d).or_insert(0i64) += r;
        }
        // merge repeated levels, drop cancelled ones, keep first-seen order
        let mut out: Vec<(u64, i64)> = Vec::new();
        for &(d, _) in factors {
            if out.iter().any(|&(x, _)| x == d) {
                continue;
            }
            let r = seen[&d];
            if r != 0 {
                out.push((d, r));
            }
        }
        Ok(EtaQuotient { factors: out, level })
    }

    pub fn empty() -> Self {
        EtaQuotient { factors: Vec::new(), level: 1 }
    }

    pub fn factors(&self) -> &[(u64, i64)] {
        &self.factors
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn exponent(&self, delta: u64) -> i64 {
        self.factors.iter().find(|&&(d, _)| d == delta).map_or(0, |&(_, r)| r)
    }

    /// Levels and exponents sorted by level.
    pub fn exponent_map(&self) -> BTreeMap<u64, i64> {
        self.factors.iter().copied().collect()
    }

    /// Same product regardless of factor order and declared level.
    pub fn same_product(&self, other: &EtaQuotient) -> bool {
        self.exponent_map() == other.exponent_map()
    }

    /// Twice the weight, `sum r_delta`.
    pub fn weight_times_two(&self) -> i64 {
        self.factors.iter().map(|&(_, r)| r).sum()
    }

    pub fn weight(&self) -> Ratio<i64> {
        Ratio::new(self.weight_times_two(), 2)
    }

    /// `sum delta * r_delta`: the q-prefactor in units of 1/24.
    pub fn prefactor_24(&self) -> i64 {
        self.factors.iter().map(|&(d, r)| d as i64 * r).sum()
    }

    pub fn mul(&self, other: &EtaQuotient) -> EtaQuotient {
        let level = self.level.lcm(&other.level);
        let mut all = self.factors.clone();
        all.extend_from_slice(&other.factors);
        Self::with_level(&all, level).unwrap()
    }

    pub fn pow(&self, k: i64) -> EtaQuotient {
        let f: Vec<_> = self.factors.iter().map(|&(d, r)| (d, r * k)).collect();
        Self::with_level(&f, self.level).unwrap()
    }

    pub fn inverse(&self) -> EtaQuotient {
        self.pow(-1)
    }

    /// `(sum delta r_delta, prod_delta (q^delta; q^delta)_inf^{r_delta})` with
    /// the product truncated to precision `n`.
    pub fn expand(&self, n: usize) -> (i64, QSeries) {
        assert!(n >= 1, "expansion precision must be positive");
        let mut coeffs = vec![BigInt::zero(); n];
        coeffs[0] = BigInt::one();
        for &(d, r) in &self.factors {
            let d = d as usize;
            if d >= n {
                continue;
            }
            for _ in 0..r.unsigned_abs() {
                if r > 0 {
                    mul_euler_in_place(&mut coeffs, d);
                } else {
                    div_euler_in_place(&mut coeffs, d);
                }
            }
        }
        (self.prefactor_24(), QSeries::from_integers(0, coeffs, n as i64))
    }

    /// The full q-expansion with the prefactor folded in, when it is an
    /// integer power of q. The product is expanded to `n` terms, so the
    /// result has precision `n + prefactor_24 / 24`.
    pub fn q_expansion(&self, n: usize) -> Result<QSeries, EtaError> {
        let (s, series) = self.expand(n);
        if s % 24 != 0 {
            return Err(EtaError::FractionalPrefactor { prefactor_24: s });
        }
        Ok(series.shift(s / 24))
    }

    /// Expansion with precision `precision` (in q-exponents, prefactor folded).
    pub fn q_expansion_to(&self, precision: i64) -> Result<QSeries, EtaError> {
        let s = self.prefactor_24();
        if s % 24 != 0 {
            return Err(EtaError::FractionalPrefactor { prefactor_24: s });
        }
        let n = (precision - s / 24).max(1) as usize;
        self.q_expansion(n)
    }

    /// Newman-style criteria for a weight-0 modular function on
    /// `Gamma_0(level)`.
    pub fn newman_check(&self) -> NewmanReport {
        let n = self.level as i64;
        let mut failures = Vec::new();
        if self.weight_times_two() != 0 {
            failures.push(format!("weight {} is not 0", self.weight()));
        }
        let s = self.prefactor_24();
        if s.rem_euclid(24) != 0 {
            failures.push(format!("sum delta*r = {s} is not 0 mod 24"));
        }
        let s2: i64 = self.factors.iter().map(|&(d, r)| (n / d as i64) * r).sum();
        if s2.rem_euclid(24) != 0 {
            failures.push(format!("sum (N/delta)*r = {s2} is not 0 mod 24"));
        }
        // prod delta^r is a rational square iff every prime appears to an even power
        let mut prime_exps: BTreeMap<u64, i64> = BTreeMap::new();
        for &(d, r) in &self.factors {
            for (p, e) in factorize(d) {
                *prime_exps.entry(p).or_insert(0) += e as i64 * r;
            }
        }
        if let Some((p, e)) = prime_exps.iter().find(|(_, e)| *e % 2 != 0) {
            failures.push(format!("prod delta^r has {p}^{e}, not a square"));
        }
        NewmanReport { ok: failures.is_empty(), failures }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewmanReport {
    pub ok: bool,
    pub failures: Vec<String>,
}

pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|(d, r)| format!("{d}:{r}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for EtaQuotient {
    type Err = EtaError;

    /// Grammar: comma-separated `level:exponent` tokens, levels positive,
    /// exponents nonzero, no repeated levels. The empty string is the empty
    /// product.
    fn from_str(s: &str) -> Result<Self, EtaError> {
        let err = |position: usize, message: &str| EtaError::Parse {
            position,
            message: message.to_string(),
        };
        if s.trim().is_empty() {
            return Ok(EtaQuotient::empty());
        }
        let mut factors = Vec::new();
        let mut offset = 0;
        for token in s.split(',') {
            let start = offset;
            offset += token.len() + 1;
            let lead = token.len() - token.trim_start().len();
            let body = token.trim();
            if body.is_empty() {
                return Err(err(start, "empty token"));
            }
            let Some(colon) = body.find(':') else {
                let bad = body.find(|c: char| !c.is_ascii_digit()).unwrap_or(body.len());
                return Err(err(start + lead + bad, "expected ':' between level and exponent"));
            };
            let (lvl, exp) = (&body[..colon], &body[colon + 1..]);
            if let Some(i) = lvl.find(|c: char| !c.is_ascii_digit()) {
                return Err(err(start + lead + i, "level must be a positive integer"));
            }
            let level: u64 = lvl
                .parse()
                .map_err(|_| err(start + lead, "level must be a positive integer"))?;
            if level == 0 {
                return Err(err(start + lead, "level must be positive"));
            }
            let exp_pos = start + lead + colon + 1;
            let digits = exp.strip_prefix('-').unwrap_or(exp);
            if digits.is_empty() {
                return Err(err(exp_pos, "missing exponent"));
            }
            if let Some(i) = digits.find(|c: char| !c.is_ascii_digit()) {
                return Err(err(exp_pos + (exp.len() - digits.len()) + i, "exponent must be an integer"));
            }
            let r: i64 = exp.parse().map_err(|_| err(exp_pos, "exponent out of range"))?;
            if r == 0 {
                return Err(err(exp_pos, "exponent must be nonzero"));
            }
            if factors.iter().any(|&(d, _)| d == level) {
                return Err(err(start + lead, "repeated level"));
            }
            factors.push((level, r));
        }
        Ok(EtaQuotient::new(&factors))
    }
}

/// Named quotients used throughout the crate.
pub mod named {
    use super::EtaQuotient;

    /// `eta_2^6 eta_49^7 / (eta_1^7 eta_98^6)`, order -10 at infinity.
    pub fn a() -> EtaQuotient {
        EtaQuotient::with_level(&[(2, 6), (49, 7), (1, -7), (98, -6)], 98).unwrap()
    }

    /// `eta_1^6 eta_98^7 / (eta_2^7 eta_49^6)`, the image of `a` under W.
    pub fn a_prime() -> EtaQuotient {
        EtaQuotient::with_level(&[(1, 6), (98, 7), (2, -7), (49, -6)], 98).unwrap()
    }

    /// `eta_7^4 / eta_1^4`
    pub fn t() -> EtaQuotient {
        EtaQuotient::with_level(&[(7, 4), (1, -4)], 14).unwrap()
    }

    /// `eta_14^4 eta_1^4 / (eta_7^4 eta_2^4)`
    pub fn p1() -> EtaQuotient {
        EtaQuotient::with_level(&[(14, 4), (1, 4), (7, -4), (2, -4)], 14).unwrap()
    }

    /// `eta_7^3 eta_1^3 / (eta_14^3 eta_2^3)`; `p2` is this minus `p1`.
    pub fn u() -> EtaQuotient {
        EtaQuotient::with_level(&[(7, 3), (1, 3), (14, -3), (2, -3)], 14).unwrap()
    }

    /// `eta_14^4 / eta_2^4`
    pub fn t_bar() -> EtaQuotient {
        EtaQuotient::with_level(&[(14, 4), (2, -4)], 14).unwrap()
    }

    /// `eta_7^4 eta_2^4 / (eta_14^4 eta_1^4)`
    pub fn p1_bar() -> EtaQuotient {
        EtaQuotient::with_level(&[(7, 4), (2, 4), (14, -4), (1, -4)], 14).unwrap()
    }

    /// `eta_14^3 eta_2^3 / (eta_7^3 eta_1^3)`; `p2_bar` is `8` times this minus `p1_bar`.
    pub fn u_bar() -> EtaQuotient {
        EtaQuotient::with_level(&[(14, 3), (2, 3), (7, -3), (1, -3)], 14).unwrap()
    }

    /// `eta_2^6 / eta_1^7`, the core of the beta = 1 generating function.
    pub fn cpsi41_core() -> EtaQuotient {
        EtaQuotient::new(&[(2, 6), (1, -7)])
    }

    /// `eta_1^6 / eta_2^7`, the interleaved beta = 0, 2 generating function.
    pub fn cpsi40_42_core() -> EtaQuotient {
        EtaQuotient::new(&[(1, 6), (2, -7)])
    }
}

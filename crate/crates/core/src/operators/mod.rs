//! `U_7` on the `Gamma_0(14)` basis: exact decompositions, the printed
//! seed identities, the degree-7 recurrence and its extension tables.

pub mod appendix;
pub mod basis;
pub mod laurent;
pub mod linalg;
pub mod recurrence;

pub use appendix::{verify_appendix, AppendixIdentity, Group, Verdict};
pub use basis::{build_basis, BasisKind, BasisTriple, TBasis};
pub use laurent::LaurentPoly;
pub use recurrence::{derive_recurrence, extend_tables, grow_tables, RecurrenceTable, Tables};

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::Zero;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::etaq::{named, EtaError, EtaQuotient};
use crate::qseries::{QSeries, SeriesError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OperatorError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Eta(#[from] EtaError),
    #[error("precision {got} too small, need at least {needed}")]
    PrecisionTooSmall { needed: i64, got: i64 },
    #[error("singular system: rank {rank} < {unknowns} unknowns (window too small or target outside the span)")]
    SingularSystem { rank: usize, unknowns: usize },
    #[error("nonzero residual{}", match .exponent { Some(e) => format!(" at q^{e}"), None => String::new() })]
    NonzeroResidual { exponent: Option<i64> },
    #[error("line {line}, byte {position}: {message}")]
    Parse { line: usize, position: usize, message: String },
    #[error("a_{j} coefficient at t^{l} has 7-adic valuation {valuation}, below {floor}")]
    ValuationViolation { j: usize, l: i64, valuation: String, floor: i64 },
    #[error("recurrence structure: {0}")]
    Structure(String),
    #[error("family {family} row k={k}: part {part} degree {n} violates the {kind} bound")]
    BoundViolation { family: String, k: i64, part: usize, n: i64, kind: String },
    #[error("family {family} row k={k} disagrees with the direct series at q^{exponent}")]
    RowMismatch { family: String, k: i64, exponent: i64 },
}

/// `part1(t) + p1 part2(t) + p2 part3(t)`; `residual_checked_to` is the
/// exclusive q-exponent up to which the reconstruction was compared.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BasisDecomposition {
    pub part1: LaurentPoly,
    pub part2: LaurentPoly,
    pub part3: LaurentPoly,
    pub residual_checked_to: i64,
}

impl BasisDecomposition {
    pub fn new(part1: LaurentPoly, part2: LaurentPoly, part3: LaurentPoly) -> Self {
        BasisDecomposition { part1, part2, part3, residual_checked_to: 0 }
    }

    pub fn parts(&self) -> [&LaurentPoly; 3] {
        [&self.part1, &self.part2, &self.part3]
    }

    fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        BasisDecomposition::new(f(&self.part1), f(&self.part2), f(&self.part3))
    }

    pub fn is_zero(&self) -> bool {
        self.parts().iter().all(|p| p.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.parts().iter().all(|p| p.is_integral())
    }

    pub fn add(&self, other: &Self) -> Self {
        BasisDecomposition::new(
            self.part1.add(&other.part1),
            self.part2.add(&other.part2),
            self.part3.add(&other.part3),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&BigRational::from_integer((-1).into())))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        self.map(|p| p.scale(c))
    }

    /// Multiplies every part by a Laurent polynomial in `t`.
    pub fn mul_poly(&self, f: &LaurentPoly) -> Self {
        self.map(|p| p.mul(f))
    }

    pub fn div_poly(&self, f: &LaurentPoly) -> Option<Self> {
        Some(BasisDecomposition::new(
            self.part1.div_exact(f)?,
            self.part2.div_exact(f)?,
            self.part3.div_exact(f)?,
        ))
    }

    /// Same coefficients (ignores `residual_checked_to`).
    pub fn same_parts(&self, other: &Self) -> bool {
        self.parts() == other.parts()
    }

    pub fn degree_range(&self) -> Option<(i64, i64)> {
        let lo = self.parts().iter().filter_map(|p| p.min_degree()).min()?;
        let hi = self.parts().iter().filter_map(|p| p.max_degree()).max()?;
        Some((lo, hi))
    }

    /// `sum c_i d_i`; integral inputs are summed on dense integer vectors.
    pub fn linear_combination(terms: &[(BigRational, &BasisDecomposition)]) -> BasisDecomposition {
        if !terms.iter().all(|(c, d)| c.is_integer() && d.is_integral()) {
            return terms.iter().fold(BasisDecomposition::default(), |acc, (c, d)| acc.add(&d.scale(c)));
        }
        let mut parts = [LaurentPoly::zero(), LaurentPoly::zero(), LaurentPoly::zero()];
        for (i, out) in parts.iter_mut().enumerate() {
            let lo = terms.iter().filter_map(|(_, d)| d.parts()[i].min_degree()).min();
            let hi = terms.iter().filter_map(|(_, d)| d.parts()[i].max_degree()).max();
            let (Some(lo), Some(hi)) = (lo, hi) else { continue };
            let mut acc = vec![BigInt::zero(); (hi - lo + 1) as usize];
            for (c, d) in terms {
                let c = c.numer();
                for (n, x) in d.parts()[i].terms() {
                    acc[(n - lo) as usize] += c * x.numer();
                }
            }
            for (j, v) in acc.into_iter().enumerate() {
                if !v.is_zero() {
                    out.set(lo + j as i64, BigRational::from_integer(v));
                }
            }
        }
        let [p1, p2, p3] = parts;
        BasisDecomposition::new(p1, p2, p3)
    }

    pub fn report(&self) -> DecompositionReport {
        DecompositionReport {
            part1: self.part1.to_string(),
            part2: self.part2.to_string(),
            part3: self.part3.to_string(),
            residual_checked_to: self.residual_checked_to,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub part1: String,
    pub part2: String,
    pub part3: String,
    pub residual_checked_to: i64,
}

/// Exact decomposition of `target` over `basis` with part degrees in
/// `window`. The window is widened downward until it reaches the target's
/// pole order. The solution is checked against the whole known window of
/// the target (or of the basis elements, whichever is shorter).
pub fn decompose(
    target: &QSeries,
    basis: &BasisTriple,
    window: RangeInclusive<i64>,
) -> Result<BasisDecomposition, OperatorError> {
    if target.is_zero() {
        return Ok(BasisDecomposition { residual_checked_to: target.precision(), ..Default::default() });
    }
    let (mut lo, mut hi) = (*window.start(), *window.end());
    let w = basis.t_order();
    let orders = basis.part_orders();
    let min_part = *orders.iter().min().unwrap();
    let max_part = *orders.iter().max().unwrap();
    let order = target.order().unwrap();
    while lo * w + min_part > order {
        lo -= 1;
    }
    hi = hi.max(lo);
    let width = (hi - lo + 1) as usize;
    let unknowns = 3 * width;
    let e_min = lo * w + min_part;
    let e_max = hi * w + max_part;
    let checked_to = target.precision().min(e_min + basis.relative_precision());
    let available = (checked_to - e_min).max(0) as usize;
    let wanted = ((e_max - e_min + 1) as usize).max(unknowns) + 24;
    let needed = unknowns + 8;
    if available < needed {
        return Err(OperatorError::PrecisionTooSmall {
            needed: e_min + needed as i64,
            got: checked_to,
        });
    }
    let rows = wanted.min(available);
    let elements = basis.elements(lo, hi);
    let columns: Vec<&QSeries> = elements.iter().flatten().collect();
    let den = target.denominator().clone();
    let mut a = Vec::with_capacity(rows);
    let mut b = Vec::with_capacity(rows);
    for r in 0..rows {
        let e = e_min + r as i64;
        let row: Result<Vec<BigInt>, SeriesError> = columns.iter().map(|s| s.int_coefficient(e)).collect();
        a.push(row?);
        let c = target.coefficient(e).unwrap();
        b.push(c.numer() * (&den / c.denom()));
    }
    let x = linalg::solve(&a, &b, unknowns).map_err(|err| match err {
        linalg::SolveError::Singular { rank, unknowns } => OperatorError::SingularSystem { rank, unknowns },
        linalg::SolveError::Inconsistent => OperatorError::NonzeroResidual { exponent: None },
    })?;
    let den = BigRational::from_integer(den);
    let mut parts = [LaurentPoly::zero(), LaurentPoly::zero(), LaurentPoly::zero()];
    for (idx, v) in x.iter().enumerate() {
        let (part, n) = (idx / width, lo + (idx % width) as i64);
        parts[part].add_term(n, &(v / &den));
    }
    let [p1, p2, p3] = parts;
    let mut d = BasisDecomposition::new(p1, p2, p3);
    let recon = basis::combine(&elements, lo, &d.parts());
    let diff = &target.truncate(checked_to) - &recon.truncate(checked_to);
    if !diff.is_zero() {
        return Err(OperatorError::NonzeroResidual { exponent: diff.order() });
    }
    d.residual_checked_to = checked_to;
    Ok(d)
}

/// The functions `u` whose `U_7(u t^k)` images the tables track.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Multiplier {
    A,
    AP1,
    AP2,
    One,
    P1,
    P2,
}

impl Multiplier {
    pub const ALL: [Multiplier; 6] =
        [Multiplier::A, Multiplier::AP1, Multiplier::AP2, Multiplier::One, Multiplier::P1, Multiplier::P2];

    /// `u t^k` as a signed sum of eta quotients (`p2 = u - p1`).
    pub fn quotients(self, k: i64) -> Vec<(i64, EtaQuotient)> {
        let tk = named::t().pow(k);
        let a = named::a();
        let with = |base: Option<&EtaQuotient>, extra: &EtaQuotient| match base {
            Some(b) => b.mul(extra).mul(&tk),
            None => extra.mul(&tk),
        };
        let one = EtaQuotient::empty();
        match self {
            Multiplier::A => vec![(1, with(Some(&a), &one))],
            Multiplier::AP1 => vec![(1, with(Some(&a), &named::p1()))],
            Multiplier::AP2 => vec![(1, with(Some(&a), &named::u())), (-1, with(Some(&a), &named::p1()))],
            Multiplier::One => vec![(1, with(None, &one))],
            Multiplier::P1 => vec![(1, with(None, &named::p1()))],
            Multiplier::P2 => vec![(1, with(None, &named::u())), (-1, with(None, &named::p1()))],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Multiplier::A => "A",
            Multiplier::AP1 => "A p1",
            Multiplier::AP2 => "A p2",
            Multiplier::One => "1",
            Multiplier::P1 => "p1",
            Multiplier::P2 => "p2",
        }
    }

    /// Exponent lower bound of `u t^k` at infinity.
    pub fn order(self, k: i64) -> i64 {
        self.quotients(k).iter().map(|(_, q)| q.prefactor_24() / 24).min().unwrap()
    }
}

/// `U_7(u t^k)` computed directly on q-series, known up to `precision`.
pub fn u7_image(m: Multiplier, k: i64, precision: i64) -> Result<QSeries, OperatorError> {
    let product_precision = 7 * precision;
    let mut acc: Option<QSeries> = None;
    for (sign, q) in m.quotients(k) {
        let s = q.q_expansion_to(product_precision)?;
        let s = if sign < 0 { s.neg() } else { s };
        acc = Some(match acc {
            None => s,
            Some(a) => &a + &s,
        });
    }
    Ok(acc.unwrap().u_operator(7))
}

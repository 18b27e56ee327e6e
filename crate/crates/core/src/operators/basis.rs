//! The `Gamma_0(14)` working basis `{t, p1, p2}` and its Atkin–Lehner mirror.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::laurent::LaurentPoly;
use super::{BasisDecomposition, OperatorError};
use crate::etaq::named;
use crate::par;
use crate::qseries::QSeries;

/// Which of the two bases a triple represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Plain,
    Bar,
}

/// `t, p1, p2` (or their mirrors), each known to `rel` coefficients past
/// its order.
#[derive(Debug, Clone)]
pub struct BasisTriple {
    pub kind: BasisKind,
    pub t: QSeries,
    pub p1: QSeries,
    pub p2: QSeries,
    rel: i64,
}

#[derive(Debug, Clone)]
pub struct TBasis {
    pub plain: BasisTriple,
    pub bar: BasisTriple,
}

/// Builds both triples with `n` known coefficients each, counted from each
/// series' leading exponent.
pub fn build_basis(n: i64) -> Result<TBasis, OperatorError> {
    if n < 8 {
        return Err(OperatorError::PrecisionTooSmall { needed: 8, got: n });
    }
    Ok(TBasis {
        plain: BasisTriple::plain(n)?,
        bar: BasisTriple::bar(n)?,
    })
}

fn expansion(eq: &crate::etaq::EtaQuotient, rel: i64) -> Result<QSeries, OperatorError> {
    Ok(eq.q_expansion(rel as usize)?)
}

impl BasisTriple {
    pub fn plain(rel: i64) -> Result<Self, OperatorError> {
        let t = expansion(&named::t(), rel)?;
        let p1 = expansion(&named::p1(), rel)?;
        // u has order -1 and p1 order 1, so u - p1 keeps rel coefficients
        let p2 = &expansion(&named::u(), rel)? - &p1;
        let triple = BasisTriple { kind: BasisKind::Plain, t, p1, p2, rel };
        triple.check_orders([1, 1, -1])?;
        Ok(triple)
    }

    pub fn bar(rel: i64) -> Result<Self, OperatorError> {
        let t = expansion(&named::t_bar(), rel)?;
        let p1 = expansion(&named::p1_bar(), rel)?;
        let u = expansion(&named::u_bar(), rel)?;
        let p2 = &u.scale_int(&BigInt::from(8)) - &p1;
        let triple = BasisTriple { kind: BasisKind::Bar, t, p1, p2, rel };
        triple.check_orders([2, -1, -1])?;
        Ok(triple)
    }

    fn check_orders(&self, want: [i64; 3]) -> Result<(), OperatorError> {
        for (s, w) in [&self.t, &self.p1, &self.p2].into_iter().zip(want) {
            if s.order() != Some(w) {
                return Err(OperatorError::PrecisionTooSmall { needed: w + 2, got: self.rel });
            }
        }
        Ok(())
    }

    /// Coefficients known past each element's leading exponent.
    pub fn relative_precision(&self) -> i64 {
        self.rel
    }

    /// `q`-order of `t`.
    pub fn t_order(&self) -> i64 {
        self.t.order().unwrap()
    }

    /// `q`-orders of the three part multipliers `1, p1, p2`.
    pub fn part_orders(&self) -> [i64; 3] {
        [0, self.p1.order().unwrap(), self.p2.order().unwrap()]
    }

    /// `t^lo .. t^hi` with `rel` known coefficients each.
    pub fn t_powers(&self, lo: i64, hi: i64) -> Vec<QSeries> {
        assert!(lo <= hi);
        let t = &self.t;
        let tinv = t.invert().expect("t is nonzero");
        let start = if lo >= 0 {
            t.pow(lo).unwrap()
        } else {
            tinv.pow(-lo).unwrap()
        };
        let start = if lo == 0 { QSeries::one(self.rel) } else { start };
        let mut out = Vec::with_capacity((hi - lo + 1) as usize);
        out.push(start);
        for _ in lo..hi {
            let next = out.last().unwrap() * t;
            out.push(next);
        }
        out
    }

    /// All `part * t^n` for `n` in `lo..=hi`, grouped by part.
    pub fn elements(&self, lo: i64, hi: i64) -> [Vec<QSeries>; 3] {
        let powers = self.t_powers(lo, hi);
        let p1 = par::map(&powers, |s| s * &self.p1);
        let p2 = par::map(&powers, |s| s * &self.p2);
        [powers, p1, p2]
    }

    /// Evaluates `part1(t) + p1 part2(t) + p2 part3(t)`.
    pub fn reconstruct(&self, d: &BasisDecomposition) -> QSeries {
        let parts = [&d.part1, &d.part2, &d.part3];
        let (lo, hi) = parts
            .iter()
            .filter_map(|p| Some((p.min_degree()?, p.max_degree()?)))
            .fold((i64::MAX, i64::MIN), |(a, b), (x, y)| (a.min(x), b.max(y)));
        if lo > hi {
            return QSeries::zero(self.rel + self.part_orders()[2]);
        }
        let elements = self.elements(lo, hi);
        combine(&elements, lo, &parts)
    }
}

/// `sum_i sum_n parts[i][n] * elements[i][n - lo]`.
pub(crate) fn combine(elements: &[Vec<QSeries>; 3], lo: i64, parts: &[&LaurentPoly; 3]) -> QSeries {
    let mut terms: Vec<(&QSeries, &BigRational)> = Vec::new();
    for i in 0..3 {
        for (n, c) in parts[i].terms() {
            terms.push((&elements[i][(n - lo) as usize], c));
        }
    }
    let precision = elements.iter().flatten().map(|s| s.precision()).min().unwrap();
    let scaled = par::map(&terms, |(s, c)| s.scale(c));
    scaled
        .iter()
        .fold(QSeries::zero(precision), |acc, s| &acc + s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::euler_product;

    #[test]
    fn leading_terms() {
        let b = build_basis(40).unwrap();
        // t = q / (q;q)^4 * (q^7;q^7)^4: q + 4q^2 + ...
        let e = euler_product(40);
        let oracle = e.pow(-4).unwrap().shift(1);
        assert_eq!(b.plain.t.coefficient(1), oracle.coefficient(1));
        assert_eq!(b.plain.t.coefficient(2), oracle.coefficient(2));
        assert_eq!(b.plain.t.int_coefficient(2).unwrap(), BigInt::from(4));
        assert_eq!(b.plain.p2.order(), Some(-1));
        assert_eq!(b.plain.p2.int_coefficient(-1).unwrap(), BigInt::from(1));
        assert_eq!(b.plain.p1.order(), Some(1));
        assert_eq!(b.plain.p1.int_coefficient(1).unwrap(), BigInt::from(1));
        assert_eq!(b.bar.t.order(), Some(2));
        assert!(matches!(build_basis(4), Err(OperatorError::PrecisionTooSmall { .. })));
    }

    #[test]
    fn bar_t_is_t_of_q_squared() {
        let b = build_basis(60).unwrap();
        let t2 = b.plain.t.substitute(2);
        assert_eq!(b.bar.t.first_difference(&t2), None);
    }

    #[test]
    fn powers_have_full_relative_precision() {
        let b = build_basis(30).unwrap();
        let pw = b.plain.t_powers(-3, 4);
        for (i, s) in pw.iter().enumerate() {
            let n = i as i64 - 3;
            assert_eq!(s.order(), Some(n));
            assert_eq!(s.precision(), n + 30);
        }
    }
}

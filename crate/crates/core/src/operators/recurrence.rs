//! The modular relation of degree 7 between `t(q)` and `t(q^7)`, which makes
//! `k -> U_7(u t^k)` satisfy a seven-term recurrence with coefficients
//! `a_j(t)`, and the tables obtained by running it forward from the seeds.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::appendix::identities;
use super::{decompose, u7_image, BasisDecomposition, BasisTriple, LaurentPoly, Multiplier, OperatorError};
use crate::par;
use crate::qseries::{ceil_div, seven_adic_valuation, QSeries, Valuation};

/// Largest power of `X = t(q^7)` searched for; the relation must not use it.
const MAX_L: i64 = 8;

/// `7^floor((7l + j - 4)/4)`, the guaranteed 7-power in `a_j` at `t^l`.
pub fn valuation_floor(j: usize, l: i64) -> i64 {
    (7 * l + j as i64 - 4).div_euclid(4)
}

/// `t^7 = sum_j a_j(t(q^7)) t^j`, with `a_j(t) = sum_l s(j,l) 7^floor t^l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceTable {
    pub a: Vec<LaurentPoly>,
    /// `s[j][l - 1]` for `l = 1..=7`.
    pub s: Vec<Vec<BigInt>>,
    pub floors: Vec<Vec<i64>>,
    /// Exclusive q-exponent up to which the relation was checked.
    pub checked_to: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceReport {
    pub a: Vec<String>,
    pub s: Vec<Vec<String>>,
    pub floors: Vec<Vec<i64>>,
    pub checked_to: i64,
}

/// Derives the relation from `basis.t` using `n` of its coefficients.
/// The monomials `t^j t(q^7)^l` have pairwise distinct orders `j + 7l`, so
/// the coefficients follow by triangular elimination; every remaining
/// coefficient of the known window must then vanish.
pub fn derive_recurrence(basis: &BasisTriple, n: i64) -> Result<RecurrenceTable, OperatorError> {
    let top = 7 * MAX_L + 6;
    if n < top + 16 || basis.relative_precision() < n {
        return Err(OperatorError::PrecisionTooSmall { needed: top + 16, got: n.min(basis.relative_precision()) });
    }
    let x = basis.t.truncate(basis.t_order() + n);
    let big_x = x.substitute(7);
    let mut xp = vec![QSeries::one(n)];
    for _ in 0..7 {
        let next = xp.last().unwrap() * &x;
        xp.push(next);
    }
    let mut xq = vec![QSeries::one(n)];
    for _ in 0..MAX_L {
        let next = xq.last().unwrap() * &big_x;
        xq.push(next);
    }
    let monomials: Vec<QSeries> = par::map_range(0..(top as usize + 1), |e| {
        let (l, j) = (e / 7, e % 7);
        &xp[j] * &xq[l]
    });
    let mut residual = xp[7].clone();
    let mut coef = vec![vec![BigInt::zero(); MAX_L as usize + 1]; 7];
    for e in 0..=top {
        let (l, j) = ((e / 7) as usize, (e % 7) as usize);
        let c = residual.int_coefficient(e)?;
        if c.is_zero() {
            continue;
        }
        residual = &residual - &monomials[e as usize].scale_int(&c);
        coef[j][l] = c;
    }
    let checked_to = residual.precision();
    if let Some(e) = residual.order() {
        return Err(OperatorError::NonzeroResidual { exponent: Some(e) });
    }
    for (j, row) in coef.iter().enumerate() {
        if !row[0].is_zero() {
            return Err(OperatorError::Structure(format!("a_{j} has a nonzero constant term")));
        }
        if !row[MAX_L as usize].is_zero() {
            return Err(OperatorError::Structure(format!("a_{j} has degree above 7")));
        }
    }
    let mut a = Vec::with_capacity(7);
    let mut s = Vec::with_capacity(7);
    let mut floors = Vec::with_capacity(7);
    let seven = BigInt::from(7);
    for (j, row) in coef.iter().enumerate() {
        let mut poly = LaurentPoly::zero();
        let (mut srow, mut frow) = (Vec::new(), Vec::new());
        for l in 1..=7i64 {
            let c = &row[l as usize];
            let floor = valuation_floor(j, l);
            let v = seven_adic_valuation(&BigRational::from_integer(c.clone()));
            if !v.at_least(floor) {
                return Err(OperatorError::ValuationViolation { j, l, valuation: format!("{v:?}"), floor });
            }
            let (q, r) = c.div_rem(&seven.pow(floor as u32));
            debug_assert!(r.is_zero());
            poly.add_term(l, &BigRational::from_integer(c.clone()));
            srow.push(q);
            frow.push(floor);
        }
        a.push(poly);
        s.push(srow);
        floors.push(frow);
    }
    Ok(RecurrenceTable { a, s, floors, checked_to })
}

impl RecurrenceTable {
    /// `row(k)` from `prev[i] = row(k - 7 + i)`, `i = 0..7`.
    pub fn forward(&self, prev: &[&BasisDecomposition]) -> BasisDecomposition {
        assert_eq!(prev.len(), 7);
        if prev.iter().all(|r| r.is_integral()) {
            let mut parts = [LaurentPoly::zero(), LaurentPoly::zero(), LaurentPoly::zero()];
            for (i, part) in parts.iter_mut().enumerate() {
                let polys: Vec<&LaurentPoly> = prev.iter().map(|r| r.parts()[i]).collect();
                *part = self.forward_dense(&polys);
            }
            let [p1, p2, p3] = parts;
            return BasisDecomposition::new(p1, p2, p3);
        }
        let mut acc = BasisDecomposition::default();
        for (a, row) in self.a.iter().zip(prev) {
            acc = acc.add(&row.mul_poly(a));
        }
        acc
    }

    /// `sum_j a_j prev[j]` on dense integer vectors; rows grow to hundreds
    /// of terms with thousand-bit coefficients, where rational maps crawl.
    fn forward_dense(&self, prev: &[&LaurentPoly]) -> LaurentPoly {
        let lo = prev.iter().filter_map(|p| p.min_degree()).min();
        let hi = prev.iter().filter_map(|p| p.max_degree()).max();
        let (Some(lo), Some(hi)) = (lo, hi) else {
            return LaurentPoly::zero();
        };
        let (lo, hi) = (lo + 1, hi + 7);
        let mut acc = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (a, p) in self.a.iter().zip(prev) {
            let a: Vec<(i64, BigInt)> = a.terms().map(|(l, c)| (l, c.to_integer())).collect();
            for (n, c) in p.terms() {
                let c = c.numer();
                for (l, x) in &a {
                    acc[(n + l - lo) as usize] += x * c;
                }
            }
        }
        let mut out = LaurentPoly::zero();
        for (i, c) in acc.into_iter().enumerate() {
            if !c.is_zero() {
                out.set(lo + i as i64, BigRational::from_integer(c));
            }
        }
        out
    }

    /// `row(k - 7)` from `rows[i] = row(k - 6 + i)`, `i = 0..7`; `None` if
    /// the division by `a_0` is not exact.
    pub fn backward(&self, rows: &[&BasisDecomposition]) -> Option<BasisDecomposition> {
        assert_eq!(rows.len(), 7);
        let mut acc = rows[6].clone();
        for j in 1..7 {
            acc = acc.sub(&rows[j - 1].mul_poly(&self.a[j]));
        }
        acc.div_poly(&self.a[0])
    }

    /// `a_j(t) / t`, a polynomial for every `j`.
    pub fn a_over_t(&self, j: usize) -> LaurentPoly {
        self.a[j].shift(-1)
    }

    pub fn report(&self) -> RecurrenceReport {
        RecurrenceReport {
            a: self.a.iter().map(|p| p.to_string()).collect(),
            s: self.s.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            floors: self.floors.clone(),
            checked_to: self.checked_to,
        }
    }
}

/// Lower bounds `(s, gamma)` per part: the part has t-order at least
/// `ceil((k + s)/7)` and its coefficient at `t^n` is divisible by
/// `7^floor((7n - k + gamma)/4)`. `None` means the part vanishes.
pub fn row_bounds(m: Multiplier) -> [Option<(i64, i64)>; 3] {
    match m {
        Multiplier::A => [Some((4, -3)), Some((-3, -2)), Some((-3, -6))],
        Multiplier::AP1 => [Some((5, -2)), Some((-2, -3)), Some((-2, -6))],
        Multiplier::AP2 => [Some((3, -2)), Some((-4, -2)), Some((-4, -6))],
        Multiplier::One => [Some((0, -1)), None, None],
        Multiplier::P1 => [Some((0, 0)), Some((3, -1)), Some((7, -4))],
        Multiplier::P2 => [Some((0, 0)), Some((3, 0)), Some((6, -4))],
    }
}

pub fn check_bounds(m: Multiplier, k: i64, row: &BasisDecomposition) -> Result<(), OperatorError> {
    let violation = |part: usize, n: i64, kind: &str| OperatorError::BoundViolation {
        family: m.label().to_string(),
        k,
        part: part + 1,
        n,
        kind: kind.to_string(),
    };
    for (i, (poly, bound)) in row.parts().into_iter().zip(row_bounds(m)).enumerate() {
        let Some((s, gamma)) = bound else {
            if let Some(n) = poly.min_degree() {
                return Err(violation(i, n, "vanishing"));
            }
            continue;
        };
        let min_order = ceil_div(k + s, 7);
        for (n, c) in poly.terms() {
            if n < min_order {
                return Err(violation(i, n, "t-order"));
            }
            let floor = (7 * n - k + gamma).div_euclid(4);
            if let Valuation::Finite(v) = seven_adic_valuation(c) {
                if v < floor {
                    return Err(violation(i, n, "7-adic valuation"));
                }
            }
        }
    }
    Ok(())
}

/// Rows `U_7(u t^k)` keyed by family and `k`.
#[derive(Debug, Clone, Default)]
pub struct Tables {
    pub rows: BTreeMap<(Multiplier, i64), BasisDecomposition>,
    /// Every family is known at least up to this `k`.
    pub k_max: i64,
}

impl Tables {
    pub fn row(&self, m: Multiplier, k: i64) -> Option<&BasisDecomposition> {
        self.rows.get(&(m, k))
    }
}

/// The printed rows `k = -6..0` for all six families.
pub fn appendix_seeds() -> BTreeMap<(Multiplier, i64), BasisDecomposition> {
    identities().into_iter().map(|i| ((i.group.multiplier(), i.k), i.rhs)).collect()
}

fn window(rows: &BTreeMap<(Multiplier, i64), BasisDecomposition>, m: Multiplier, lo: i64) -> Option<Vec<&BasisDecomposition>> {
    (lo..lo + 7).map(|k| rows.get(&(m, k))).collect()
}

/// Runs the recurrence forward from the seeds to `k_max`, then checks every
/// new row against `U_7` of the product series on the basis window, and
/// the t-order and valuation bounds on all rows `0..=k_max`.
pub fn extend_tables(
    table: &RecurrenceTable,
    seeds: &BTreeMap<(Multiplier, i64), BasisDecomposition>,
    k_max: i64,
    basis: &BasisTriple,
) -> Result<Tables, OperatorError> {
    let limits = Multiplier::ALL.map(|m| (m, k_max));
    let tables = grow_tables(table, seeds, &limits)?;
    let jobs: Vec<(Multiplier, i64)> =
        Multiplier::ALL.iter().flat_map(|&m| (1..=k_max).map(move |k| (m, k))).collect();
    let checks = par::map(&jobs, |&(m, k)| verify_row(m, k, &tables.rows[&(m, k)], basis));
    for c in checks {
        c?;
    }
    Ok(tables)
}

/// Runs the recurrence forward to `k_max` per family and asserts the
/// t-order and valuation bounds on rows `0..=k_max`, without comparing the
/// rows to q-series (rows far out have hundreds of t-degrees).
pub fn grow_tables(
    table: &RecurrenceTable,
    seeds: &BTreeMap<(Multiplier, i64), BasisDecomposition>,
    limits: &[(Multiplier, i64)],
) -> Result<Tables, OperatorError> {
    let mut rows = seeds.clone();
    for &(m, k_max) in limits {
        for k in 1..=k_max {
            if rows.contains_key(&(m, k)) {
                continue;
            }
            let prev = window(&rows, m, k - 7).ok_or_else(|| {
                OperatorError::Structure(format!("missing seed rows for {} below k={k}", m.label()))
            })?;
            let next = table.forward(&prev);
            rows.insert((m, k), next);
        }
    }
    let jobs: Vec<(Multiplier, i64)> = limits.iter().flat_map(|&(m, k_max)| (0..=k_max).map(move |k| (m, k))).collect();
    for c in par::map(&jobs, |&(m, k)| check_bounds(m, k, &rows[&(m, k)])) {
        c?;
    }
    let k_max = limits.iter().map(|&(_, k)| k).min().unwrap_or(0);
    Ok(Tables { rows, k_max })
}

/// Compares a row with `U_7(u t^k)` on every exponent both sides know.
/// Returns the number of coefficients compared.
pub fn verify_row(m: Multiplier, k: i64, row: &BasisDecomposition, basis: &BasisTriple) -> Result<i64, OperatorError> {
    let recon = basis.reconstruct(row);
    let start = m.order(k).div_euclid(7).min(recon.lowest_exponent());
    let end = recon.precision();
    let direct = u7_image(m, k, end)?;
    for e in start..end {
        if direct.coefficient(e) != recon.coefficient(e) {
            return Err(OperatorError::RowMismatch { family: m.label().to_string(), k, exponent: e });
        }
    }
    Ok(end - start)
}

/// Decomposes `U_7(u t^k)` straight from the product series.
pub fn direct_row(m: Multiplier, k: i64, basis: &BasisTriple) -> Result<BasisDecomposition, OperatorError> {
    let lo = m.order(k).div_euclid(7) - 1;
    // degrees grow by 7 per step of k
    let hi = 7 * k.max(0) + 9;
    let precision = basis.relative_precision() + lo - 1;
    let target = u7_image(m, k, precision)?;
    decompose(&target, basis, lo..=hi)
}

/// Recomputes the seeds `k = 0..-6` of family `m` by running the recurrence
/// downward from direct decompositions of the rows `k = 1..=7`. Returns the
/// first `k` whose reproduced row differs from the seed.
pub fn reproduce_seeds_downward(
    table: &RecurrenceTable,
    m: Multiplier,
    seeds: &BTreeMap<(Multiplier, i64), BasisDecomposition>,
    basis: &BasisTriple,
) -> Result<Option<i64>, OperatorError> {
    let ks: Vec<i64> = (1..=7).collect();
    let direct = par::map(&ks, |&k| direct_row(m, k, basis));
    let mut rows: BTreeMap<i64, BasisDecomposition> = BTreeMap::new();
    for (k, d) in ks.iter().zip(direct) {
        rows.insert(*k, d?);
    }
    for k in (-6..=0).rev() {
        let window: Vec<&BasisDecomposition> = (k + 1..=k + 7).map(|i| &rows[&i]).collect();
        let row = table
            .backward(&window)
            .ok_or_else(|| OperatorError::Structure(format!("a_0 does not divide the k={k} combination")))?;
        if !seeds.get(&(m, k)).is_some_and(|s| s.same_parts(&row)) {
            return Ok(Some(k));
        }
        rows.insert(k, row);
    }
    Ok(None)
}

impl BasisDecomposition {
    /// Coefficients as integers; `None` if any is fractional.
    pub fn integer_parts(&self) -> Option<[BTreeMap<i64, BigInt>; 3]> {
        let conv = |p: &LaurentPoly| -> Option<BTreeMap<i64, BigInt>> {
            p.terms().map(|(n, c)| c.denom().is_one().then(|| (n, c.numer().clone()))).collect()
        };
        Some([conv(&self.part1)?, conv(&self.part2)?, conv(&self.part3)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> (BasisTriple, RecurrenceTable) {
        let basis = BasisTriple::plain(140).unwrap();
        let t = derive_recurrence(&basis, 140).unwrap();
        (basis, t)
    }

    #[test]
    fn relation_shape() {
        let (_, t) = table();
        assert!(t.checked_to >= 140);
        for j in 0..7 {
            assert!(t.a[j].min_degree().unwrap_or(1) >= 1, "a_{j} divisible by t");
            assert!(t.a[j].max_degree().unwrap_or(0) <= 7);
            assert!(t.a[j].is_integral());
            for l in 1..=7i64 {
                let c = t.a[j].coeff(l);
                assert!(seven_adic_valuation(&c).at_least(valuation_floor(j, l)));
                let f = t.floors[j][l as usize - 1];
                let back = BigRational::from_integer(&t.s[j][l as usize - 1] * BigInt::from(7).pow(f as u32));
                assert_eq!(back, c);
            }
        }
        assert!(t.a_over_t(3).min_degree().unwrap_or(0) >= 0);
    }

    #[test]
    fn too_few_coefficients() {
        let basis = BasisTriple::plain(40).unwrap();
        assert!(matches!(derive_recurrence(&basis, 40), Err(OperatorError::PrecisionTooSmall { .. })));
    }

    #[test]
    fn forward_step_gives_u7_t() {
        let (basis, t) = table();
        let seeds = appendix_seeds();
        let prev = window(&seeds, Multiplier::One, -6).unwrap();
        let row = t.forward(&prev);
        assert!(row.is_integral());
        assert!(verify_row(Multiplier::One, 1, &row, &basis).unwrap() > 100);
        check_bounds(Multiplier::One, 1, &row).unwrap();
    }

    #[test]
    fn backward_reproduces_t_minus_3() {
        let (basis, t) = table();
        let seeds = appendix_seeds();
        // rows -2..4: seeds for k <= 0, direct decompositions above
        let mut rows = Vec::new();
        for k in -2..=4 {
            rows.push(match seeds.get(&(Multiplier::One, k)) {
                Some(r) => r.clone(),
                None => direct_row(Multiplier::One, k, &basis).unwrap(),
            });
        }
        let refs: Vec<&BasisDecomposition> = rows.iter().collect();
        let back = t.backward(&refs).unwrap();
        assert!(back.same_parts(&seeds[&(Multiplier::One, -3)]));
    }

    #[test]
    fn bounds_reject_bad_rows() {
        let row = BasisDecomposition::new(LaurentPoly::from_ints(&[(1, 1)]), LaurentPoly::zero(), LaurentPoly::zero());
        // U_7(t^0) part1 at t^1 needs 7^floor((7 - 0 - 1)/4) = 7
        let err = check_bounds(Multiplier::One, 0, &row).unwrap_err();
        assert!(matches!(err, OperatorError::BoundViolation { n: 1, .. }), "{err}");
        let row = BasisDecomposition::new(LaurentPoly::zero(), LaurentPoly::from_ints(&[(0, 1)]), LaurentPoly::zero());
        assert!(check_bounds(Multiplier::One, 0, &row).is_err());
    }
}

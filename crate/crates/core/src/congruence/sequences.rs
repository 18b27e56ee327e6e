//! `L_alpha` and `K_alpha`: the series, their extraction identities, the
//! valuation floors and the lattice membership of their decompositions.
//!
//! `L_0 = 1`, `L_{2a+1} = U_7(A L_{2a})`, `L_{2a+2} = U_7(L_{2a+1})`, and
//! `K` is the same recursion with `A'` in place of `A`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::families::{cpsi40_42_coefficients, cpsi41_coefficients, FamilyCoefficients};
use super::lambda::lambda;
use super::xspace::{x_membership, MembershipVerdict, Space, XSpaceProfile};
use super::CongruenceError;
use crate::etaq::{named, EtaQuotient};
use crate::operators::recurrence::{appendix_seeds, direct_row};
use crate::operators::{
    decompose, derive_recurrence, grow_tables, BasisDecomposition, BasisTriple, LaurentPoly, Multiplier,
    OperatorError, RecurrenceTable, Tables,
};
use crate::par;
use crate::qseries::{seven_adic_valuation, QSeries, Valuation};

/// Coefficients every computed term must keep.
pub const MIN_WINDOW: i64 = 50;
/// Structural decompositions stop here: the next step needs the rows
/// `U_7(t^k)` out to `k` near 400.
pub const STRUCTURAL_ALPHA_MAX: u32 = 3;
/// Smallest t-degree span of a direct decomposition window.
pub const MIN_WINDOW_DEGREES: i64 = 15;
const RECURRENCE_TERMS: i64 = 200;
const BASIS_TERMS: i64 = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SeqKind {
    L,
    K,
}

impl SeqKind {
    pub fn label(self) -> &'static str {
        match self {
            SeqKind::L => "L",
            SeqKind::K => "K",
        }
    }

    /// `A` for `L`, `A'` for `K`.
    pub fn multiplier(self) -> EtaQuotient {
        match self {
            SeqKind::L => named::a(),
            SeqKind::K => named::a_prime(),
        }
    }

    pub fn multiplier_order(self) -> i64 {
        self.multiplier().prefactor_24() / 24
    }

    /// Leading exponent of the `alpha`-th term.
    pub fn low(self, alpha: u32) -> i64 {
        match (self, alpha) {
            (_, 0) => 0,
            (SeqKind::L, a) if a % 2 == 1 => -1,
            (SeqKind::L, _) => 0,
            (SeqKind::K, a) if a % 2 == 1 => 3,
            (SeqKind::K, _) => 1,
        }
    }

    /// `K` lives on the mirrored basis.
    pub fn bar(self) -> bool {
        self == SeqKind::K
    }

    /// `(c, s, P)` such that `c q^s P * term` is the generating function of
    /// the extracted coefficients (products without their q-prefactors).
    fn extraction(self, alpha: u32) -> (i64, i64, EtaQuotient) {
        let odd = alpha % 2 == 1;
        match (self, odd) {
            (SeqKind::L, true) => (4, 1, EtaQuotient::new(&[(14, 6), (7, -7)])),
            (SeqKind::L, false) => (4, 0, EtaQuotient::new(&[(2, 6), (1, -7)])),
            (SeqKind::K, true) => (1, -3, EtaQuotient::new(&[(7, 6), (14, -7)])),
            (SeqKind::K, false) => (1, -1, EtaQuotient::new(&[(1, 6), (2, -7)])),
        }
    }

    fn families(alpha: u32) -> [Multiplier; 3] {
        if alpha % 2 == 1 {
            [Multiplier::A, Multiplier::AP1, Multiplier::AP2]
        } else {
            [Multiplier::One, Multiplier::P1, Multiplier::P2]
        }
    }
}

/// `ceil(alpha / 2)`.
pub fn valuation_floor(alpha: u32) -> i64 {
    alpha.div_ceil(2) as i64
}

/// Precisions (exclusive q-exponents) of the terms `0..=alpha_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub kind: SeqKind,
    pub alpha_max: u32,
    pub window: i64,
    pub precisions: Vec<i64>,
}

impl Budget {
    /// Precision of the zeroth term, i.e. the starting precision `N`.
    pub fn start(&self) -> i64 {
        self.precisions[0]
    }
}

/// Smallest starting precision leaving `window` coefficients in the last
/// term. Each `U_7` needs `7p - 6` input coefficients for `p` outputs.
pub fn required_precision(kind: SeqKind, alpha_max: u32, window: i64) -> Budget {
    let a = kind.multiplier_order();
    let mut p = vec![0i64; alpha_max as usize + 1];
    p[alpha_max as usize] = kind.low(alpha_max) + window;
    for alpha in (1..=alpha_max).rev() {
        let extra = if alpha % 2 == 1 { a } else { 0 };
        p[alpha as usize - 1] = (7 * p[alpha as usize] - 6 - extra).max(1);
    }
    Budget { kind, alpha_max, window, precisions: p }
}

/// Precisions reached from starting precision `start`.
pub fn precisions_from(kind: SeqKind, alpha_max: u32, start: i64) -> Vec<i64> {
    let a = kind.multiplier_order();
    let mut p = vec![start];
    for alpha in 1..=alpha_max {
        let prev = *p.last().unwrap();
        let extra = if alpha % 2 == 1 { a } else { 0 };
        p.push(-((-(prev + extra)).div_euclid(7)));
    }
    p
}

/// The raw series `term_1 .. term_alpha_max` from starting precision `start`.
pub fn sequence_series(kind: SeqKind, alpha_max: u32, start: i64) -> Result<Vec<QSeries>, CongruenceError> {
    let a_order = kind.multiplier_order();
    let a = kind.multiplier().q_expansion_to(start + a_order)?;
    let mut out: Vec<QSeries> = Vec::with_capacity(alpha_max as usize);
    for alpha in 1..=alpha_max {
        let next = match out.last() {
            None => a.u_operator(7),
            Some(prev) if alpha % 2 == 1 => {
                let need = prev.precision() + a_order - prev.lowest_exponent();
                (&a.truncate(need) * prev).u_operator(7)
            }
            Some(prev) => prev.u_operator(7),
        };
        out.push(next);
    }
    Ok(out)
}

/// Everything the structural checks share: both bases, the recurrence,
/// the extended row tables and the plain-basis decompositions of `L_1, L_2, ...`.
#[derive(Debug, Clone)]
pub struct Structure {
    pub plain: BasisTriple,
    pub bar: BasisTriple,
    pub recurrence: RecurrenceTable,
    pub tables: Tables,
    pub chain: Vec<BasisDecomposition>,
}

impl Structure {
    /// Builds the chain up to `min(alpha_max, STRUCTURAL_ALPHA_MAX)`: each
    /// step substitutes the rows `U_7(u t^k)` into the previous decomposition.
    pub fn build(alpha_max: u32) -> Result<Self, CongruenceError> {
        let plain = BasisTriple::plain(BASIS_TERMS)?;
        let bar = BasisTriple::bar(BASIS_TERMS)?;
        let recurrence = derive_recurrence(&plain, RECURRENCE_TERMS)?;
        let mut tables = Tables { rows: appendix_seeds(), k_max: 0 };
        let mut chain: Vec<BasisDecomposition> = Vec::new();
        let one = BasisDecomposition::new(LaurentPoly::from_ints(&[(0, 1)]), LaurentPoly::zero(), LaurentPoly::zero());
        for alpha in 1..=alpha_max.min(STRUCTURAL_ALPHA_MAX) {
            let prev = chain.last().unwrap_or(&one);
            let families = SeqKind::families(alpha);
            let top = prev.degree_range().map_or(0, |r| r.1);
            let limits = families.map(|m| (m, top));
            tables = grow_tables(&recurrence, &tables.rows, &limits)?;
            let next = substitute_rows(&tables, prev, families)?;
            chain.push(next);
        }
        Ok(Structure { plain, bar, recurrence, tables, chain })
    }

    pub fn basis(&self, kind: SeqKind) -> &BasisTriple {
        if kind.bar() {
            &self.bar
        } else {
            &self.plain
        }
    }
}

/// `sum_i sum_n c_i(n) U_7(u_i t^n)` with the rows read from the tables.
fn substitute_rows(
    tables: &Tables,
    d: &BasisDecomposition,
    families: [Multiplier; 3],
) -> Result<BasisDecomposition, OperatorError> {
    let mut terms: Vec<(BigRational, &BasisDecomposition)> = Vec::new();
    for (part, m) in d.parts().into_iter().zip(families) {
        for (n, c) in part.terms() {
            let row = tables
                .row(m, n)
                .ok_or_else(|| OperatorError::Structure(format!("no row for {} at k={n}", m.label())))?;
            terms.push((c.clone(), row));
        }
    }
    Ok(BasisDecomposition::linear_combination(&terms))
}

/// How a term's decomposition was obtained and checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckedDecomposition {
    #[serde(skip)]
    pub decomposition: BasisDecomposition,
    /// `"structural"`, `"direct"` or `"structural+direct"`.
    pub source: String,
    pub degree_range: Option<(i64, i64)>,
    /// t-degree span of the direct solve window, when one was run.
    pub direct_window_degrees: Option<i64>,
    /// q-exponents on which the reconstruction matched the series.
    pub residual_exponents: i64,
}

#[derive(Debug, Clone)]
pub struct SequenceTerm {
    pub kind: SeqKind,
    pub alpha: u32,
    pub series: QSeries,
    pub valuation_floor: i64,
    pub min_valuation: Valuation,
    pub extraction_checked: i64,
    pub decomposition: Option<CheckedDecomposition>,
    pub membership: Option<MembershipVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceReport {
    pub sequence: String,
    pub alpha: u32,
    pub lowest: i64,
    pub precision: i64,
    pub valuation_floor: i64,
    pub min_valuation: String,
    pub extraction_checked: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<CheckedDecomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub membership: Option<MembershipVerdict>,
}

impl SequenceTerm {
    pub fn name(&self) -> String {
        format!("{}_{}", self.kind.label(), self.alpha)
    }

    pub fn report(&self) -> SequenceReport {
        SequenceReport {
            sequence: self.kind.label().to_string(),
            alpha: self.alpha,
            lowest: self.series.lowest_exponent(),
            precision: self.series.precision(),
            valuation_floor: self.valuation_floor,
            min_valuation: self.min_valuation.to_string(),
            extraction_checked: self.extraction_checked,
            decomposition: self.decomposition.clone(),
            membership: self.membership.clone(),
        }
    }
}

/// Coefficient tables the extraction identities are compared with.
#[derive(Debug, Clone)]
pub struct Supplies {
    pub psi41: Option<FamilyCoefficients>,
    pub psi40: Option<FamilyCoefficients>,
    pub psi42: Option<FamilyCoefficients>,
}

impl Supplies {
    /// Enough coefficients for the extraction checks of terms with the
    /// given precisions.
    pub fn for_precisions(kind: SeqKind, precisions: &[i64]) -> Result<Self, CongruenceError> {
        let mut needed = 1u64;
        for (alpha, &p) in precisions.iter().enumerate().skip(1) {
            let alpha = alpha as u32;
            let (_, s, _) = kind.extraction(alpha);
            let top = (p + s - 1).max(0) as u64;
            let m = 7u64.pow(alpha);
            let n = match kind {
                SeqKind::L => m * top + lambda(1, alpha).lambda_u64().unwrap(),
                SeqKind::K => m * (top / 2) + lambda(0, alpha).lambda_u64().unwrap().max(lambda(2, alpha).lambda_u64().unwrap()),
            };
            needed = needed.max(n + 1);
        }
        let needed = needed as usize;
        Ok(match kind {
            SeqKind::L => Supplies { psi41: Some(cpsi41_coefficients(needed)), psi40: None, psi42: None },
            SeqKind::K => {
                let (psi0, psi2) = cpsi40_42_coefficients(needed)?;
                Supplies { psi41: None, psi40: Some(psi0), psi42: Some(psi2) }
            }
        })
    }

    fn value(f: &Option<FamilyCoefficients>, index: u64) -> Result<BigInt, CongruenceError> {
        let f = f.as_ref().ok_or(CongruenceError::InsufficientCoefficients { needed: index as usize + 1, got: 0 })?;
        f.get(index as usize)
            .cloned()
            .ok_or(CongruenceError::InsufficientCoefficients { needed: index as usize + 1, got: f.len() })
    }

    /// Coefficient of `q^j` in the extracted generating function.
    fn expected(&self, kind: SeqKind, alpha: u32, j: i64) -> Result<BigInt, CongruenceError> {
        if j < 0 {
            return Ok(BigInt::from(0));
        }
        let m = 7u64.pow(alpha);
        let j = j as u64;
        match kind {
            SeqKind::L => Self::value(&self.psi41, m * j + lambda(1, alpha).lambda_u64().unwrap()),
            SeqKind::K if j % 2 == 1 => Self::value(&self.psi42, m * (j / 2) + lambda(2, alpha).lambda_u64().unwrap()),
            SeqKind::K => Ok(-Self::value(&self.psi40, m * (j / 2) + lambda(0, alpha).lambda_u64().unwrap())?),
        }
    }
}

/// Compares `c q^s P * term` with the extracted coefficients on the whole
/// window. Returns the number of exponents compared.
pub fn check_extraction(
    kind: SeqKind,
    alpha: u32,
    series: &QSeries,
    supplies: &Supplies,
) -> Result<i64, CongruenceError> {
    let (c, s, product) = kind.extraction(alpha);
    let g_precision = series.precision() + s;
    if g_precision <= 0 {
        return Ok(0);
    }
    let (_, p) = product.expand(g_precision as usize);
    let g = (&series.shift(s) * &p).scale_int(&BigInt::from(c));
    let start = g.lowest_exponent().min(0);
    for j in start..g.precision() {
        let got = g.coefficient(j).unwrap();
        let want = BigRational::from_integer(supplies.expected(kind, alpha, j)?);
        if got != want {
            return Err(CongruenceError::ExtractionMismatch { sequence: kind.label().into(), alpha, exponent: j });
        }
    }
    Ok(g.precision() - start)
}

/// Every coefficient must be divisible by `7^ceil(alpha/2)`.
pub fn check_valuation(kind: SeqKind, alpha: u32, series: &QSeries) -> Result<Valuation, CongruenceError> {
    let floor = valuation_floor(alpha);
    for (e, c) in series.terms() {
        let v = seven_adic_valuation(&c);
        if !v.at_least(floor) {
            return Err(CongruenceError::ValuationFailure {
                sequence: kind.label().into(),
                alpha,
                exponent: e,
                valuation: v.to_string(),
                floor,
            });
        }
    }
    Ok(series.min_valuation(7))
}

/// Reconstructs the part of `d` that reaches below the series precision
/// and compares it with the series. Returns the exponents compared.
pub fn check_residual(
    kind: SeqKind,
    alpha: u32,
    series: &QSeries,
    d: &BasisDecomposition,
    basis: &BasisTriple,
) -> Result<i64, CongruenceError> {
    let w = basis.t_order();
    let min_part = *basis.part_orders().iter().min().unwrap();
    let keep = |p: &LaurentPoly| {
        let mut out = LaurentPoly::zero();
        for (n, c) in p.terms() {
            if n * w + min_part < series.precision() {
                out.set(n, c.clone());
            }
        }
        out
    };
    let visible = BasisDecomposition::new(keep(&d.part1), keep(&d.part2), keep(&d.part3));
    let recon = basis.reconstruct(&visible);
    let end = recon.precision().min(series.precision());
    if let Some((e, _, _)) = recon.first_difference(series) {
        return Err(CongruenceError::DecompositionMismatch {
            sequence: kind.label().into(),
            alpha,
            detail: format!("reconstruction differs at q^{e}"),
        });
    }
    Ok(end - recon.lowest_exponent().min(series.lowest_exponent()))
}

/// Decomposes the series directly over a window of at least
/// `MIN_WINDOW_DEGREES` t-degrees. `None` when the series is too short.
fn direct_decomposition(
    series: &QSeries,
    basis: &BasisTriple,
    hint: Option<(i64, i64)>,
) -> Result<Option<(BasisDecomposition, i64)>, OperatorError> {
    let (lo, hi) = hint.unwrap_or((0, 0));
    let hi = hi.max(lo + MIN_WINDOW_DEGREES - 1) + 1;
    match decompose(series, basis, lo..=hi) {
        Ok(d) => {
            let lo = d.degree_range().map_or(lo, |r| r.0.min(lo));
            Ok(Some((d, hi - lo + 1)))
        }
        Err(OperatorError::PrecisionTooSmall { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn check_decomposition(
    kind: SeqKind,
    alpha: u32,
    series: &QSeries,
    structure: &Structure,
) -> Result<Option<CheckedDecomposition>, CongruenceError> {
    let basis = structure.basis(kind);
    // beyond the structural chain the decomposition spans hundreds of
    // degrees and a direct solve is out of reach
    let Some(structural) = structure.chain.get(alpha as usize - 1) else {
        return Ok(None);
    };
    let range = structural.degree_range();
    let direct = match range {
        Some((lo, hi)) if hi - lo >= 100 => None,
        _ => direct_decomposition(series, basis, range)?,
    };
    let (source, direct_window_degrees) = match direct {
        Some((d, span)) => {
            if !structural.same_parts(&d) {
                return Err(CongruenceError::DecompositionMismatch {
                    sequence: kind.label().into(),
                    alpha,
                    detail: "structural and direct decompositions differ".into(),
                });
            }
            ("structural+direct", Some(span))
        }
        None => ("structural", None),
    };
    let decomposition = structural.clone();
    let residual_exponents = check_residual(kind, alpha, series, &decomposition, basis)?;
    Ok(Some(CheckedDecomposition {
        degree_range: decomposition.degree_range(),
        decomposition,
        source: source.into(),
        direct_window_degrees,
        residual_exponents,
    }))
}

/// `7^{-ceil(alpha/2)} d` tested against `X^(alpha mod 2)` (mirrored for `K`).
pub fn check_membership(kind: SeqKind, alpha: u32, d: &BasisDecomposition) -> Result<MembershipVerdict, CongruenceError> {
    let scale = BigRational::new(BigInt::from(1), BigInt::from(7).pow(valuation_floor(alpha) as u32));
    let space = Space::for_alpha(alpha, kind.bar());
    let verdict = x_membership(&d.scale(&scale), &XSpaceProfile::new(space));
    if let Some(v) = &verdict.first_violation {
        return Err(CongruenceError::MembershipFailure {
            sequence: kind.label().into(),
            alpha,
            space: format!("{space:?}"),
            part: v.part,
            degree: v.degree,
            reason: v.reason.clone(),
        });
    }
    Ok(verdict)
}

/// Computes and checks `term_1 .. term_alpha_max` from starting precision
/// `start`, refusing runs that leave fewer than `window` coefficients.
pub fn sequence_with(
    kind: SeqKind,
    alpha_max: u32,
    start: i64,
    window: i64,
    structure: &Structure,
) -> Result<Vec<SequenceTerm>, CongruenceError> {
    if alpha_max == 0 {
        return Err(CongruenceError::InvalidAlpha);
    }
    let precisions = precisions_from(kind, alpha_max, start);
    for alpha in 1..=alpha_max {
        let got = precisions[alpha as usize] - kind.low(alpha);
        if got < window {
            return Err(CongruenceError::UnderBudget { sequence: kind.label().into(), alpha, got, needed: window });
        }
    }
    let series = sequence_series(kind, alpha_max, start)?;
    let supplies = Supplies::for_precisions(kind, &precisions)?;
    let alphas: Vec<u32> = (1..=alpha_max).collect();
    let terms = par::map(&alphas, |&alpha| -> Result<SequenceTerm, CongruenceError> {
        let s = &series[alpha as usize - 1];
        let min_valuation = check_valuation(kind, alpha, s)?;
        let extraction_checked = check_extraction(kind, alpha, s, &supplies)?;
        let decomposition = check_decomposition(kind, alpha, s, structure)?;
        let membership = match &decomposition {
            Some(d) => Some(check_membership(kind, alpha, &d.decomposition)?),
            None => None,
        };
        Ok(SequenceTerm {
            kind,
            alpha,
            series: s.clone(),
            valuation_floor: valuation_floor(alpha),
            min_valuation,
            extraction_checked,
            decomposition,
            membership,
        })
    });
    terms.into_iter().collect()
}

/// `L_1 .. L_alpha_max` from starting precision `n`, all checks applied.
pub fn l_sequence(alpha_max: u32, n: i64) -> Result<Vec<SequenceTerm>, CongruenceError> {
    let structure = Structure::build(alpha_max)?;
    sequence_with(SeqKind::L, alpha_max, n, MIN_WINDOW, &structure)
}

/// `K_1 .. K_alpha_max` from starting precision `n`, all checks applied.
pub fn k_sequence(alpha_max: u32, n: i64) -> Result<Vec<SequenceTerm>, CongruenceError> {
    let structure = Structure::build(alpha_max)?;
    sequence_with(SeqKind::K, alpha_max, n, MIN_WINDOW, &structure)
}

/// The parts of `U_7(A p2 t)` the induction step divides by 7.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisibilityCheck {
    /// `(label, value)` for the `p1` constant, `p2` constant and `p2 t`
    /// coefficient.
    pub values: Vec<(String, String)>,
    pub divisible: bool,
}

pub fn induction_divisibility(structure: &Structure) -> Result<DivisibilityCheck, CongruenceError> {
    let row = direct_row(Multiplier::AP2, 1, &structure.plain)?;
    if let Some(t) = structure.tables.row(Multiplier::AP2, 1) {
        if !t.same_parts(&row) {
            return Err(CongruenceError::DecompositionMismatch {
                sequence: "U7(A p2 t)".into(),
                alpha: 1,
                detail: "recurrence row and direct decomposition differ".into(),
            });
        }
    }
    let picks = [("p1 constant", row.part2.coeff(0)), ("p2 constant", row.part3.coeff(0)), ("p2 t", row.part3.coeff(1))];
    let divisible = picks
        .iter()
        .all(|(_, c)| c.is_integer() && (c.numer() % 7u32) == BigInt::from(0));
    Ok(DivisibilityCheck {
        values: picks.iter().map(|(l, c)| (l.to_string(), c.to_string())).collect(),
        divisible,
    })
}

//! The 42 seed identities `U_7(u t^k)` for `k = 0..-6` and their
//! verification against direct q-series computations.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::Serialize;

use super::{u7_image, BasisDecomposition, BasisTriple, LaurentPoly, Multiplier, OperatorError};
use crate::etaq::{valence_bound, CuspOrderTable};
use crate::etaq::{named, EtaQuotient};
use crate::par;
use crate::qseries::QSeries;

/// Default lower bound on the number of coefficients compared per identity.
pub const VERIFICATION_FLOOR: u64 = 500;

const TABLE: &str = include_str!("appendix.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Group {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl Group {
    pub const ALL: [Group; 6] = [Group::I, Group::II, Group::III, Group::IV, Group::V, Group::VI];

    pub fn multiplier(self) -> Multiplier {
        Multiplier::ALL[self as usize]
    }

    pub fn of(m: Multiplier) -> Group {
        Group::ALL[Multiplier::ALL.iter().position(|&x| x == m).unwrap()]
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = ["I", "II", "III", "IV", "V", "VI"][*self as usize];
        f.write_str(s)
    }
}

impl FromStr for Group {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        Group::ALL
            .into_iter()
            .find(|g| g.to_string().eq_ignore_ascii_case(s) || s == (*g as usize + 1).to_string())
            .ok_or_else(|| format!("unknown group '{s}' (expected I..VI)"))
    }
}

/// `U_7(u t^k) = part1(t) + p1 part2(t) + p2 part3(t)` as printed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppendixIdentity {
    pub group: Group,
    pub k: i64,
    pub rhs: BasisDecomposition,
}

impl AppendixIdentity {
    pub fn id(&self) -> String {
        format!("{}.k{}", self.group, self.k)
    }

    /// Eta quotients whose cuspwise minimum bounds the right-hand side.
    pub fn rhs_quotients(&self) -> Vec<EtaQuotient> {
        let t = named::t();
        let mut out = Vec::new();
        let d = &self.rhs;
        for (n, _) in d.part1.terms() {
            out.push(t.pow(n));
        }
        for (n, _) in d.part2.terms() {
            out.push(named::p1().mul(&t.pow(n)));
        }
        for (n, _) in d.part3.terms() {
            out.push(named::u().mul(&t.pow(n)));
            out.push(named::p1().mul(&t.pow(n)));
        }
        out
    }

    pub fn valence_bound(&self) -> u64 {
        let qs = self.rhs_quotients();
        valence_bound(&CuspOrderTable::for_sum(qs.iter(), 14))
    }
}

/// Parses the `group | k | part1 | part2 | part3` table format; `#` starts
/// a comment line.
pub fn parse_identities(text: &str) -> Result<Vec<AppendixIdentity>, OperatorError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |position: usize, message: String| OperatorError::Parse { line: line_no, position, message };
        let mut fields = Vec::new();
        let mut start = 0;
        for (i, ch) in line.char_indices() {
            if ch == '|' {
                fields.push((start, &line[start..i]));
                start = i + 1;
            }
        }
        fields.push((start, &line[start..]));
        if fields.len() != 5 {
            return Err(err(0, format!("expected 5 '|'-separated fields, found {}", fields.len())));
        }
        let group: Group = fields[0].1.parse().map_err(|m| err(fields[0].0, m))?;
        let k: i64 = fields[1].1.trim().parse().map_err(|_| err(fields[1].0, "expected integer k".into()))?;
        let mut parts = Vec::with_capacity(3);
        for &(offset, field) in &fields[2..] {
            parts.push(LaurentPoly::parse(field).map_err(|(p, m)| err(offset + p, m))?);
        }
        let part3 = parts.pop().unwrap();
        let part2 = parts.pop().unwrap();
        let part1 = parts.pop().unwrap();
        out.push(AppendixIdentity { group, k, rhs: BasisDecomposition::new(part1, part2, part3) });
    }
    Ok(out)
}

/// The built-in table of 42 identities.
pub fn identities() -> Vec<AppendixIdentity> {
    parse_identities(TABLE).expect("built-in table parses")
}

pub fn group_identities(group: Group) -> Vec<AppendixIdentity> {
    identities().into_iter().filter(|i| i.group == group).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub exponent: i64,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub identity_id: String,
    pub status: &'static str,
    pub terms_verified: u64,
    pub bound_used: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<Mismatch>,
}

impl Verdict {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

fn fraction(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Compares `lhs` and `rhs` on `[start, start + terms)`.
fn compare(lhs: &QSeries, rhs: &QSeries, start: i64, terms: u64) -> Option<Mismatch> {
    (start..start + terms as i64).find_map(|e| {
        let (a, b) = (lhs.coefficient(e).unwrap(), rhs.coefficient(e).unwrap());
        (a != b).then(|| Mismatch { exponent: e, lhs: fraction(&a), rhs: fraction(&b) })
    })
}

/// Checks each identity on at least `max(n, floor, valence bound)`
/// coefficients, starting at the lower of the two sides' orders.
pub fn verify_identities(
    list: &[AppendixIdentity],
    n: u64,
    floor: u64,
) -> Result<Vec<Verdict>, OperatorError> {
    if list.is_empty() {
        return Ok(Vec::new());
    }
    let bounds: Vec<u64> = list.iter().map(|i| i.valence_bound().max(floor)).collect();
    let terms: Vec<u64> = bounds.iter().map(|&b| b.max(n)).collect();
    // the lowest right-hand element is p2 t^n with order n - 1
    let lowest_rhs = list
        .iter()
        .filter_map(|i| i.rhs.degree_range())
        .map(|(lo, _)| lo.min(0) - 1)
        .min()
        .unwrap_or(-1);
    let rel = *terms.iter().max().unwrap() as i64 + (lowest_rhs.min(0)).abs() + 8;
    let basis = BasisTriple::plain(rel)?;
    let jobs: Vec<usize> = (0..list.len()).collect();
    let results = par::map(&jobs, |&i| -> Result<Verdict, OperatorError> {
        let id = &list[i];
        let m = id.group.multiplier();
        let lhs_floor = m.order(id.k).div_euclid(7);
        let rhs = basis.reconstruct(&id.rhs);
        let start = match rhs.order() {
            Some(o) => o.min(lhs_floor),
            None => lhs_floor,
        };
        let end = start + terms[i] as i64;
        if rhs.precision() < end {
            return Err(OperatorError::PrecisionTooSmall { needed: end, got: rhs.precision() });
        }
        let lhs = u7_image(m, id.k, end)?;
        let first_mismatch = compare(&lhs, &rhs, start, terms[i]);
        Ok(Verdict {
            identity_id: id.id(),
            status: if first_mismatch.is_none() { "ok" } else { "mismatch" },
            terms_verified: terms[i],
            bound_used: bounds[i],
            first_mismatch,
        })
    });
    results.into_iter().collect()
}

/// Verifies the built-in identities of the given groups on `n` coefficients.
pub fn verify_appendix(groups: &[Group], n: u64) -> Result<Vec<Verdict>, OperatorError> {
    if n < VERIFICATION_FLOOR {
        return Err(OperatorError::PrecisionTooSmall { needed: VERIFICATION_FLOOR as i64, got: n as i64 });
    }
    let list: Vec<AppendixIdentity> = identities().into_iter().filter(|i| groups.contains(&i.group)).collect();
    verify_identities(&list, n, VERIFICATION_FLOOR)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find(g: Group, k: i64) -> AppendixIdentity {
        identities().into_iter().find(|i| i.group == g && i.k == k).unwrap()
    }

    #[test]
    fn table_shape() {
        let all = identities();
        assert_eq!(all.len(), 42);
        for g in Group::ALL {
            let ks: Vec<i64> = all.iter().filter(|i| i.group == g).map(|i| i.k).collect();
            assert_eq!(ks, vec![0, -1, -2, -3, -4, -5, -6], "{g}");
        }
        assert!(all.iter().all(|i| i.rhs.is_integral()));
    }

    #[test]
    fn printed_examples() {
        let iv = find(Group::IV, -2);
        assert_eq!(iv.rhs.part1, LaurentPoly::from_ints(&[(0, 20), (2, -343)]));
        let vi = find(Group::VI, 0);
        assert_eq!(vi.rhs.part1, LaurentPoly::from_ints(&[(0, -4)]));
        assert_eq!(vi.rhs.part3, LaurentPoly::from_ints(&[(1, 1)]));
        let ii = find(Group::II, -1);
        assert_eq!(ii.rhs.part1, LaurentPoly::from_ints(&[(1, 14)]));
        assert_eq!(ii.rhs.part2, LaurentPoly::from_ints(&[(0, 2), (1, 7)]));
        assert_eq!(ii.rhs.part3, LaurentPoly::from_ints(&[(0, 2), (1, 23), (2, 49)]));
        let i0 = find(Group::I, 0);
        assert_eq!(i0.rhs.part2.coeff(1), BigRational::from_integer((6161 * 7).into()));
        assert_eq!(i0.id(), "I.k0");
    }

    #[test]
    fn parse_errors_locate_field() {
        let err = parse_identities("# c\nIV | -2 | 20 - 7^3*t^2 | 0\n").unwrap_err();
        assert!(matches!(err, OperatorError::Parse { line: 2, .. }), "{err}");
        let err = parse_identities("IV | -2 | 20 -- t | 0 | 0").unwrap_err();
        match err {
            OperatorError::Parse { line: 1, position, .. } => assert_eq!(position, 14),
            other => panic!("{other}"),
        }
        assert!(parse_identities("VII | 0 | 1 | 0 | 0").is_err());
    }

    #[test]
    fn group_iv_and_vi_verify_short() {
        let list: Vec<_> = identities()
            .into_iter()
            .filter(|i| matches!(i.group, Group::IV | Group::VI))
            .collect();
        let verdicts = verify_identities(&list, 60, 0).unwrap();
        for v in &verdicts {
            assert!(v.ok(), "{v:?}");
            assert!(v.terms_verified >= 60);
        }
    }

    #[test]
    fn perturbed_identity_reports_mismatch() {
        let mut id = find(Group::IV, -2);
        id.rhs.part1.add_term(2, &BigRational::from_integer(7.into()));
        let v = &verify_identities(&[id], 40, 0).unwrap()[0];
        assert_eq!(v.status, "mismatch");
        let m = v.first_mismatch.as_ref().unwrap();
        assert_eq!(m.exponent, 2);
        let json = serde_json::to_string(v).unwrap();
        assert!(json.contains("\"first_mismatch\":{\"exponent\":2"), "{json}");
    }

    #[test]
    fn floor_enforced() {
        assert!(matches!(verify_appendix(&[Group::I], 10), Err(OperatorError::PrecisionTooSmall { .. })));
        assert_eq!("iv".parse::<Group>().unwrap(), Group::IV);
        assert_eq!("3".parse::<Group>().unwrap(), Group::III);
    }
}

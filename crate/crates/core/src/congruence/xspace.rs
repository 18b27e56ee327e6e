//! The lattices `X^(0)`, `X^(1)` of basis decompositions and their mirrors
//! on the Atkin–Lehner image basis.

use num_rational::BigRational;
use serde::Serialize;

use crate::operators::BasisDecomposition;
use crate::qseries::{seven_adic_valuation, Valuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Space {
    X0,
    X1,
    X0Bar,
    X1Bar,
}

impl Space {
    /// `X^(1)` for odd `alpha`, `X^(0)` for even.
    pub fn for_alpha(alpha: u32, bar: bool) -> Space {
        match (alpha % 2 == 1, bar) {
            (true, false) => Space::X1,
            (false, false) => Space::X0,
            (true, true) => Space::X1Bar,
            (false, true) => Space::X0Bar,
        }
    }
}

/// What a part may carry at degrees 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Absent,
    Any,
    /// Coefficient divisible by `7^v`.
    Divisible(i64),
}

/// Degree 0, degree 1, and the offset `c` of the floor `(7n + c)/4` for
/// degrees `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartRule {
    pub degree0: Slot,
    pub degree1: Slot,
    pub tail: i64,
}

impl PartRule {
    pub fn floor(&self, n: i64) -> Option<Slot> {
        match n {
            n if n < 0 => Some(Slot::Absent),
            0 => Some(self.degree0),
            1 => Some(self.degree1),
            n => Some(Slot::Divisible((7 * n + self.tail).div_euclid(4))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XSpaceProfile {
    pub space: Space,
    pub parts: [PartRule; 3],
}

impl XSpaceProfile {
    pub fn new(space: Space) -> Self {
        use Slot::*;
        let rule = |degree0, degree1, tail| PartRule { degree0, degree1, tail };
        let parts = match space {
            Space::X0 | Space::X0Bar => [rule(Any, Divisible(1), -2), rule(Absent, Divisible(1), -2), rule(Absent, Any, -6)],
            Space::X1 | Space::X1Bar => [rule(Absent, Any, -7), rule(Any, Any, -7), rule(Any, Any, -11)],
        };
        XSpaceProfile { space, parts }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub part: usize,
    pub degree: i64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipVerdict {
    pub space: Space,
    pub member: bool,
    /// Nonzero coefficients inspected.
    pub terms_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<Violation>,
}

/// Checks that `d` lies in the space: only allowed degrees, the valuation
/// floors, and integrality of each `coefficient / 7^floor`.
pub fn x_membership(d: &BasisDecomposition, profile: &XSpaceProfile) -> MembershipVerdict {
    let mut terms_checked = 0;
    for (i, (poly, rule)) in d.parts().into_iter().zip(profile.parts).enumerate() {
        for (n, c) in poly.terms() {
            terms_checked += 1;
            if let Some(reason) = slot_violation(rule.floor(n).unwrap(), c) {
                return MembershipVerdict {
                    space: profile.space,
                    member: false,
                    terms_checked,
                    first_violation: Some(Violation { part: i + 1, degree: n, reason }),
                };
            }
        }
    }
    MembershipVerdict { space: profile.space, member: true, terms_checked, first_violation: None }
}

fn slot_violation(slot: Slot, c: &BigRational) -> Option<String> {
    if !c.is_integer() {
        return Some(format!("coefficient {c} is not an integer"));
    }
    match slot {
        Slot::Absent => Some("degree not allowed".into()),
        Slot::Any => None,
        Slot::Divisible(v) => match seven_adic_valuation(c) {
            Valuation::Finite(got) if got < v => Some(format!("7-adic valuation {got} below {v}")),
            _ => None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::LaurentPoly;

    fn dec(p1: &[(i64, i64)], p2: &[(i64, i64)], p3: &[(i64, i64)]) -> BasisDecomposition {
        BasisDecomposition::new(LaurentPoly::from_ints(p1), LaurentPoly::from_ints(p2), LaurentPoly::from_ints(p3))
    }

    #[test]
    fn zero_is_everywhere() {
        for s in [Space::X0, Space::X1, Space::X0Bar, Space::X1Bar] {
            assert!(x_membership(&BasisDecomposition::default(), &XSpaceProfile::new(s)).member);
        }
    }

    #[test]
    fn x0_rejects_part2_constant() {
        let v = x_membership(&dec(&[], &[(0, 1)], &[]), &XSpaceProfile::new(Space::X0));
        assert!(!v.member);
        assert_eq!(v.first_violation.unwrap().part, 2);
        assert!(x_membership(&dec(&[], &[(0, 1)], &[]), &XSpaceProfile::new(Space::X1)).member);
    }

    #[test]
    fn floors() {
        let x0 = XSpaceProfile::new(Space::X0);
        // t^1 needs one 7, t^2 needs floor(12/4) = 3
        assert!(!x_membership(&dec(&[(1, 1)], &[], &[]), &x0).member);
        assert!(x_membership(&dec(&[(0, 5), (1, 7), (2, 343)], &[], &[(1, 3)]), &x0).member);
        assert!(!x_membership(&dec(&[(2, 49)], &[], &[]), &x0).member);
        let x1 = XSpaceProfile::new(Space::X1);
        // p2 t^2 needs floor(3/4) = 0, t^3 on part 1 needs floor(14/4) = 3
        assert!(x_membership(&dec(&[(1, 2)], &[(0, 1)], &[(2, 1)]), &x1).member);
        assert!(!x_membership(&dec(&[(3, 49)], &[], &[]), &x1).member);
        assert!(!x_membership(&dec(&[(0, 1)], &[], &[]), &x1).member);
        assert!(!x_membership(&dec(&[(-1, 1)], &[], &[]), &x1).member);
    }
}

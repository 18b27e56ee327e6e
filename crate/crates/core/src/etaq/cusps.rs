//! Cusps of `Gamma_0(N)` and Ligozat orders of eta quotients.

use num_integer::Integer;
use num_rational::Ratio;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{divisors, EtaQuotient};

/// A cusp `a/c` with `c | N`. The cusp at infinity is `1/N`, the cusp 0 is `0/1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cusp {
    pub a: i64,
    pub c: u64,
}

impl std::fmt::Display for Cusp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.a, self.c)
    }
}

fn euler_phi(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

/// Representatives: for each divisor `c` of `N`, `phi(gcd(c, N/c))` cusps
/// `a/c`, with `a` the smallest positive integer coprime to `c` in each unit
/// class mod `gcd(c, N/c)` (and `0/1` for `c = 1`). Ordered by `c`, then `a`.
pub fn cusp_representatives(n: u64) -> Vec<Cusp> {
    let mut out = Vec::new();
    for c in divisors(n) {
        if c == 1 {
            out.push(Cusp { a: 0, c: 1 });
            continue;
        }
        let g = c.gcd(&(n / c));
        let want = euler_phi(g) as usize;
        let mut classes: Vec<u64> = Vec::new();
        let mut a = 1u64;
        while classes.len() < want {
            if a.gcd(&c) == 1 && a.gcd(&g) == 1 && !classes.contains(&(a % g)) {
                classes.push(a % g);
                out.push(Cusp { a: a as i64, c });
            }
            a += 1;
        }
    }
    out
}

/// Ligozat order of `eq` at a cusp with denominator `c` on `Gamma_0(N)`,
/// measured in the local parameter at that cusp.
pub fn ligozat_order(eq: &EtaQuotient, c: u64, n: u64) -> Ratio<i64> {
    assert!(n.is_multiple_of(c), "cusp denominator must divide N");
    let mut sum = Ratio::from_integer(0i64);
    for &(d, r) in eq.factors() {
        let g = c.gcd(&d) as i64;
        sum += Ratio::new(g * g * r, d as i64);
    }
    sum * Ratio::new(n as i64, 24 * c.pow(2).gcd(&n) as i64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuspOrder {
    pub cusp: Cusp,
    pub order: Ratio<i64>,
}

impl Serialize for CuspOrder {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CuspOrder", 2)?;
        st.serialize_field("cusp", &self.cusp.to_string())?;
        st.serialize_field("order", &format!("{}/{}", self.order.numer(), self.order.denom()))?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CuspOrderTable {
    pub entries: Vec<CuspOrder>,
}

impl CuspOrderTable {
    pub fn for_quotient(eq: &EtaQuotient, n: u64) -> Self {
        let entries = cusp_representatives(n)
            .into_iter()
            .map(|cusp| CuspOrder { cusp, order: ligozat_order(eq, cusp.c, n) })
            .collect();
        CuspOrderTable { entries }
    }

    /// Lower bounds for a sum of functions: the cuspwise minimum.
    pub fn for_sum<'a>(terms: impl IntoIterator<Item = &'a EtaQuotient>, n: u64) -> Self {
        let mut table: Option<CuspOrderTable> = None;
        for eq in terms {
            let next = Self::for_quotient(eq, n);
            table = Some(match table {
                None => next,
                Some(mut t) => {
                    for (x, y) in t.entries.iter_mut().zip(next.entries) {
                        x.order = x.order.min(y.order);
                    }
                    t
                }
            });
        }
        table.unwrap_or_else(|| Self::for_quotient(&EtaQuotient::empty(), n))
    }

    pub fn order_at(&self, cusp: Cusp) -> Option<Ratio<i64>> {
        self.entries.iter().find(|e| e.cusp == cusp).map(|e| e.order)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap()
    }
}

/// Number of vanishing q-coefficients that force a weight-0 function with
/// these cusp orders to be identically zero: `1 + sum max(0, -order)`.
pub fn valence_bound(table: &CuspOrderTable) -> u64 {
    1 + table
        .entries
        .iter()
        .map(|e| (-e.order).ceil().to_integer().max(0) as u64)
        .sum::<u64>()
}

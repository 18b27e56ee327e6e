//! The eta multiplier via Dedekind sums.

use num_integer::Integer;
use num_rational::Ratio;

use super::EtaError;

/// Dedekind sum `s(h, k)` for `k > 0`, via reciprocity.
pub fn dedekind_sum(h: i64, k: i64) -> Ratio<i64> {
    assert!(k > 0, "dedekind_sum needs k > 0");
    let g = h.gcd(&k);
    let (h, k) = (h / g, k / g);
    let h = h.rem_euclid(k);
    if k == 1 || h == 0 {
        return Ratio::from_integer(0);
    }
    // s(h,k) + s(k,h) = (h/k + k/h + 1/(hk)) / 12 - 1/4
    let rhs = (Ratio::new(h, k) + Ratio::new(k, h) + Ratio::new(1, h * k)) / 12 - Ratio::new(1, 4);
    rhs - dedekind_sum(k, h)
}

/// Exponent `k mod 24` with `nu_eta(M) = exp(pi i k / 12)`, so that
/// `eta(M tau) = nu_eta(M) (c tau + d)^{1/2} eta(tau)` with the principal root.
pub fn eta_multiplier(m: [[i64; 2]; 2]) -> Result<i64, EtaError> {
    let [[a, b], [c, d]] = m;
    let det = a * d - b * c;
    if det != 1 {
        return Err(EtaError::NotUnimodular { det });
    }
    let k = if c == 0 {
        if d == 1 {
            b
        } else {
            -b - 6
        }
    } else if c < 0 {
        eta_multiplier([[-a, -b], [-c, -d]])? + 6
    } else {
        // (a + d)/(12c) - s(d, c) - 1/4, times 12
        let x = Ratio::new(a + d, c) - dedekind_sum(d, c) * 12 - 3;
        assert!(x.is_integer(), "eta multiplier exponent {x} not integral");
        x.to_integer()
    };
    Ok(k.rem_euclid(24))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: the defining sum over r = 1..k-1 of ((r/k))((hr/k)).
    fn naive_dedekind(h: i64, k: i64) -> Ratio<i64> {
        let saw = |x: Ratio<i64>| {
            if x.is_integer() {
                Ratio::from_integer(0)
            } else {
                x - x.floor() - Ratio::new(1, 2)
            }
        };
        (1..k).map(|r| saw(Ratio::new(r, k)) * saw(Ratio::new(h * r, k))).sum()
    }

    #[test]
    fn dedekind_matches_definition() {
        for k in 1..30 {
            for h in -30..30 {
                if h.gcd(&k) == 1 {
                    assert_eq!(dedekind_sum(h, k), naive_dedekind(h, k), "s({h},{k})");
                }
            }
        }
    }

    #[test]
    fn multiplier_examples() {
        assert_eq!(eta_multiplier([[1, 1], [0, 1]]).unwrap(), 1);
        assert_eq!(eta_multiplier([[1, 0], [0, 1]]).unwrap(), 0);
        assert_eq!(eta_multiplier([[0, -1], [1, 0]]).unwrap(), 21);
        assert_eq!(eta_multiplier([[-1, 0], [0, -1]]).unwrap(), 18);
        assert!(matches!(eta_multiplier([[2, 0], [0, 1]]), Err(EtaError::NotUnimodular { det: 2 })));
    }
}

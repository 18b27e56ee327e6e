//! The residue classes `24 n = 3 beta^2 - 8 (mod 7^alpha)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaClass {
    pub beta: u32,
    pub alpha: u32,
    #[serde(serialize_with = "decimal")]
    pub lambda: BigInt,
    #[serde(serialize_with = "decimal")]
    pub modulus: BigInt,
    /// The printed closed form, or `None` where it is not an integer.
    #[serde(serialize_with = "decimal_opt")]
    pub closed_form: Option<BigInt>,
}

fn decimal<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

fn decimal_opt<S: serde::Serializer>(x: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.collect_str(x),
        None => s.serialize_none(),
    }
}

fn seven_pow(alpha: u32) -> BigInt {
    BigInt::from(7).pow(alpha)
}

/// Modular inverse by the extended Euclidean algorithm.
fn inverse_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    assert!(g.gcd == BigInt::from(1), "24 is invertible modulo powers of 7");
    g.x.mod_floor(m)
}

/// Printed closed forms: `beta = 1` (odd and even alpha), `beta = 0`, and
/// for `beta = 2` the `/8` form, which is never an integer.
pub fn closed_form(beta: u32, alpha: u32) -> Option<BigInt> {
    let p = seven_pow(alpha);
    let (num, den): (BigInt, i64) = match beta {
        1 if alpha % 2 == 1 => (&p * 11 - 5, 24),
        1 => (&p * 5 - 5, 24),
        0 => (&p - 1, 3),
        2 => (&p * 5 + 1, 8),
        _ => return None,
    };
    let (q, r) = num.div_rem(&BigInt::from(den));
    r.is_zero().then_some(q)
}

/// `(1 + 5 * 7^alpha) / 6`, which does satisfy the `beta = 2` congruence.
pub fn beta2_divided_by_six(alpha: u32) -> BigInt {
    (seven_pow(alpha) * 5 + 1) / 6
}

/// Minimal `n >= 0` with `24 n = 3 beta^2 - 8 (mod 7^alpha)`.
pub fn lambda(beta: u32, alpha: u32) -> LambdaClass {
    let modulus = seven_pow(alpha);
    let rhs = BigInt::from(3 * (beta as i64).pow(2) - 8);
    let lambda = (rhs * inverse_mod(&BigInt::from(24), &modulus)).mod_floor(&modulus);
    LambdaClass { beta, alpha, lambda, modulus, closed_form: closed_form(beta, alpha) }
}

impl LambdaClass {
    pub fn lambda_u64(&self) -> Option<u64> {
        self.lambda.to_u64()
    }

    /// Whether the printed closed form exists and agrees.
    pub fn matches_closed_form(&self) -> bool {
        self.closed_form.as_ref() == Some(&self.lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_values() {
        assert_eq!(lambda(1, 1).lambda, BigInt::from(3));
        assert_eq!(lambda(1, 2).lambda, BigInt::from(10));
        assert_eq!(lambda(1, 3).lambda, BigInt::from(157));
        assert_eq!(lambda(0, 1).lambda, BigInt::from(2));
        assert_eq!(lambda(2, 1).lambda, BigInt::from(6));
        assert_eq!(lambda(2, 3).lambda, BigInt::from(286));
    }

    #[test]
    fn closed_forms_agree_where_integral() {
        for alpha in 1..=8 {
            assert!(lambda(1, alpha).matches_closed_form(), "beta=1 alpha={alpha}");
            assert!(lambda(0, alpha).matches_closed_form(), "beta=0 alpha={alpha}");
            assert_eq!(closed_form(2, alpha), None);
            assert_eq!(lambda(2, alpha).lambda, beta2_divided_by_six(alpha));
        }
    }

    #[test]
    fn minimality_scan() {
        for beta in 0..=2u32 {
            for alpha in 1..=5u32 {
                let class = lambda(beta, alpha);
                let m = class.modulus.to_i64().unwrap();
                let target = (3 * (beta as i64).pow(2) - 8).rem_euclid(m);
                let first = (0..m).find(|n| (24 * n).rem_euclid(m) == target).unwrap();
                assert_eq!(class.lambda, BigInt::from(first));
            }
        }
    }
}

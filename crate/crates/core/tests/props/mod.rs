//! Properties shared by the proptest suite and the acceptance runner.

#![allow(dead_code)]

use std::sync::OnceLock;

use frob7_core::congruence::lambda;
use frob7_core::operators::{decompose, BasisDecomposition, BasisTriple, LaurentPoly};
use frob7_core::QSeries;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn series() -> impl Strategy<Value = QSeries> {
    (-3i64..=3, prop::collection::vec(-40i64..40, 1..12)).prop_map(|(lo, c)| {
        let p = lo + c.len() as i64;
        QSeries::from_i64s(lo, &c, p)
    })
}

fn same(a: &QSeries, b: &QSeries, what: &str) -> Result<(), TestCaseError> {
    match a.first_difference(b) {
        None => Ok(()),
        Some((e, x, y)) => Err(TestCaseError::fail(format!("{what}: q^{e} gives {x} vs {y}"))),
    }
}

pub fn ring_axioms(a: &QSeries, b: &QSeries, c: &QSeries) -> Result<(), TestCaseError> {
    same(&(&(a + b) + c), &(a + &(b + c)), "additive associativity")?;
    same(&(a + b), &(b + a), "additive commutativity")?;
    same(&(a * b), &(b * a), "multiplicative commutativity")?;
    same(&(&(a * b) * c), &(a * &(b * c)), "multiplicative associativity")?;
    same(&(a * &(b + c)), &(&(a * b) + &(a * c)), "distributivity")?;
    same(&(a * &QSeries::one(a.precision())), a, "unit")?;
    prop_assert!((a - &a.clone()).is_zero());
    Ok(())
}

pub fn u_undoes_substitute(a: &QSeries, m: u64) -> Result<(), TestCaseError> {
    let back = a.substitute(m).u_operator(m);
    prop_assert_eq!(back.precision(), a.precision());
    same(&back, a, "U_m(f(q^m))")
}

fn small_basis() -> &'static BasisTriple {
    static BASIS: OnceLock<BasisTriple> = OnceLock::new();
    BASIS.get_or_init(|| BasisTriple::plain(80).unwrap())
}

pub fn parts() -> impl Strategy<Value = [Vec<(i64, i64)>; 3]> {
    let part = prop::collection::vec((-1i64..=4, -30i64..30), 0..5);
    [part.clone(), part.clone(), part]
}

/// Reconstructing a decomposition and decomposing the result again gives it back.
pub fn decomposition_round_trip(parts: &[Vec<(i64, i64)>; 3]) -> Result<(), TestCaseError> {
    let d = BasisDecomposition::new(
        LaurentPoly::from_ints(&parts[0]),
        LaurentPoly::from_ints(&parts[1]),
        LaurentPoly::from_ints(&parts[2]),
    );
    let basis = small_basis();
    let series = basis.reconstruct(&d);
    let back = decompose(&series, basis, -1..=4).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(back.same_parts(&d), "{:?} came back as {:?}", d, back);
    Ok(())
}

/// Exhaustive: no `n < lambda` solves `24 n = 3 beta^2 - 8 (mod 7^alpha)`,
/// and `lambda` does.
pub fn lambda_minimal(max_alpha: u32) -> Result<(), String> {
    for beta in 0..=2u32 {
        for alpha in 1..=max_alpha {
            let m = 7i64.pow(alpha);
            let target = (3 * (beta as i64).pow(2) - 8).rem_euclid(m);
            let lam = lambda(beta, alpha).lambda.to_i64().unwrap();
            if (24 * lam).rem_euclid(m) != target {
                return Err(format!("lambda({beta},{alpha}) = {lam} is not in the class"));
            }
            if let Some(n) = (0..lam).find(|n| (24 * n).rem_euclid(m) == target) {
                return Err(format!("lambda({beta},{alpha}) = {lam} but {n} is smaller"));
            }
        }
    }
    Ok(())
}

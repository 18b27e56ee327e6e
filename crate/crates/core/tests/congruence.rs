use frob7_core::congruence::sequences::{induction_divisibility, sequence_with, Structure, MIN_WINDOW};
use frob7_core::congruence::{cphi4_coefficients, cpsi4_coefficients, required_precision, SeqKind, Space};
use num_bigint::BigInt;

/// Counts colored Frobenius symbols through the triple product: each color
/// contributes `z^m q^{m^2/2}` over `(q;q)`, and family `beta` keeps the
/// `m in Z^4` with `sum m = 2 - beta`.
fn lattice_count(beta: i64, n: usize) -> Vec<i128> {
    let s = 2 - beta;
    let min = [0, 3, 4][s.unsigned_abs() as usize];
    let r = ((2 * n + 4) as f64).sqrt() as i64 + 1;
    let mut theta = vec![0i128; n];
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                let d = s - a - b - c;
                let eight_e = 4 * (a * a + b * b + c * c + d * d) - s * s - min;
                assert_eq!(eight_e % 8, 0);
                if let Some(slot) = theta.get_mut((eight_e / 8) as usize) {
                    *slot += 1;
                }
            }
        }
    }
    // 1/(q;q)^4
    for _ in 0..4 {
        for k in 1..n {
            for i in k..n {
                theta[i] += theta[i - k];
            }
        }
    }
    theta
}

#[test]
fn families_match_symbol_counts() {
    let n = 60;
    for beta in 0..=2u32 {
        let got = cpsi4_coefficients(beta, n).unwrap().values;
        let want: Vec<BigInt> = lattice_count(beta as i64, n).into_iter().map(BigInt::from).collect();
        assert_eq!(got, want, "beta = {beta}");
    }
    let phi = cphi4_coefficients(n).unwrap().values;
    assert_eq!(&phi[..6], &[1, 16, 68, 256, 777, 2160].map(BigInt::from));
}

#[test]
fn l_and_k_to_third_level() {
    let structure = Structure::build(3).unwrap();
    for kind in [SeqKind::L, SeqKind::K] {
        let budget = required_precision(kind, 3, MIN_WINDOW);
        let terms = sequence_with(kind, 3, budget.start(), MIN_WINDOW, &structure).unwrap();
        for t in &terms {
            let d = t.decomposition.as_ref().expect("decomposed");
            let m = t.membership.as_ref().unwrap();
            assert!(m.member);
            assert_eq!(m.space, Space::for_alpha(t.alpha, kind == SeqKind::K));
            if t.alpha <= 2 {
                assert_eq!(d.source, "structural+direct");
                assert!(d.direct_window_degrees.unwrap() >= 15);
            }
            assert!(d.residual_exponents >= MIN_WINDOW);
            assert!(t.min_valuation.at_least(t.valuation_floor));
        }
    }
    let check = induction_divisibility(&structure).unwrap();
    assert!(check.divisible);
}

//! Exact solution of overdetermined integer linear systems by elimination
//! modulo word-sized primes, Chinese remaindering and rational reconstruction.
//! Every candidate is checked against the original system over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::par;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveError {
    Singular { rank: usize, unknowns: usize },
    Inconsistent,
}

const MAX_PRIMES: usize = 2000;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Primes below 2^62, descending.
fn primes() -> impl Iterator<Item = u64> {
    let mut n = (1u64 << 62) - 1;
    std::iter::from_fn(move || {
        while !is_prime_u64(n) {
            n -= 2;
        }
        let p = n;
        n -= 2;
        Some(p)
    })
}

fn reduce(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().unwrap()
}

struct ModResult {
    rank: usize,
    consistent: bool,
    solution: Vec<u64>,
}

/// Reduced row echelon form of `[a | b]` modulo `p`.
fn solve_mod(a: &[Vec<BigInt>], b: &[BigInt], unknowns: usize, p: u64) -> ModResult {
    let rows = a.len();
    let width = unknowns + 1;
    let mut m: Vec<u64> = Vec::with_capacity(rows * width);
    for (row, rhs) in a.iter().zip(b) {
        m.extend(row.iter().map(|x| reduce(x, p)));
        m.push(reduce(rhs, p));
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..unknowns {
        let Some(piv) = (r..rows).find(|&i| m[i * width + col] != 0) else {
            continue;
        };
        if piv != r {
            for j in 0..width {
                m.swap(piv * width + j, r * width + j);
            }
        }
        let inv = pow_mod(m[r * width + col], p - 2, p);
        for j in col..width {
            m[r * width + j] = mul_mod(m[r * width + j], inv, p);
        }
        let pivot_row: Vec<u64> = m[r * width..(r + 1) * width].to_vec();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = m[i * width + col];
            if f == 0 {
                continue;
            }
            let row = &mut m[i * width..(i + 1) * width];
            for j in col..width {
                let sub = mul_mod(f, pivot_row[j], p);
                row[j] = if row[j] >= sub { row[j] - sub } else { row[j] + p - sub };
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows {
            break;
        }
    }
    let consistent = (r..rows).all(|i| m[i * width + unknowns] == 0);
    let mut solution = vec![0u64; unknowns];
    for (i, &col) in pivots.iter().enumerate() {
        solution[col] = m[i * width + unknowns];
    }
    ModResult { rank: r, consistent, solution }
}

/// Smallest `a/b` with `a = b x mod m`, `|a|, b <= sqrt(m/2)`.
fn rational_reconstruct(x: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m >> 1usize).sqrt();
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.is_zero() || s1.abs() > bound {
        return None;
    }
    let value = BigRational::new(r1, s1);
    Some(value)
}

fn check_exact(a: &[Vec<BigInt>], b: &[BigInt], x: &[BigRational]) -> bool {
    let den = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let xi: Vec<BigInt> = x.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    let ok = par::map_range(0..a.len(), |i| {
        let mut acc = BigInt::zero();
        for (c, v) in a[i].iter().zip(&xi) {
            if !c.is_zero() && !v.is_zero() {
                acc += c * v;
            }
        }
        acc == &b[i] * &den
    });
    ok.into_iter().all(|v| v)
}

/// Solves `a x = b` exactly. `a` must have full column rank.
pub fn solve(a: &[Vec<BigInt>], b: &[BigInt], unknowns: usize) -> Result<Vec<BigRational>, SolveError> {
    if unknowns == 0 {
        return if b.iter().all(|x| x.is_zero()) { Ok(Vec::new()) } else { Err(SolveError::Inconsistent) };
    }
    let mut modulus = BigInt::one();
    let mut residues: Vec<BigInt> = vec![BigInt::zero(); unknowns];
    let mut previous: Option<Vec<BigRational>> = None;
    let mut deficient = 0;
    let mut best_rank = 0;
    for p in primes().take(MAX_PRIMES) {
        let res = solve_mod(a, b, unknowns, p);
        best_rank = best_rank.max(res.rank);
        if res.rank < unknowns {
            deficient += 1;
            if deficient >= 2 {
                return Err(SolveError::Singular { rank: best_rank, unknowns });
            }
            continue;
        }
        if !res.consistent {
            return Err(SolveError::Inconsistent);
        }
        // CRT: x = r + M * ((s - r) * M^-1 mod p)
        let pb = BigInt::from(p);
        let m_inv = BigInt::from(pow_mod(reduce(&modulus, p), p - 2, p));
        for (r, s) in residues.iter_mut().zip(&res.solution) {
            let diff = (BigInt::from(*s) - &*r).mod_floor(&pb);
            let k = (diff * &m_inv).mod_floor(&pb);
            *r += &modulus * k;
        }
        modulus *= &pb;
        let candidate: Option<Vec<BigRational>> =
            residues.iter().map(|r| rational_reconstruct(r, &modulus)).collect();
        if let Some(c) = candidate {
            if previous.as_ref() == Some(&c) && check_exact(a, b, &c) {
                return Ok(c);
            }
            previous = Some(c);
        } else {
            previous = None;
        }
    }
    Err(SolveError::Inconsistent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn primes_are_prime() {
        let ps: Vec<u64> = primes().take(3).collect();
        assert!(ps.iter().all(|&p| p < 1 << 62 && is_prime_u64(p)));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
    }

    #[test]
    fn solves_rational_system() {
        let a = big(&[&[2, 1], &[1, 3], &[1, 1]]);
        // x = 1/2, y = -7/3
        let x = BigRational::new(1.into(), 2.into());
        let y = BigRational::new((-7).into(), 3.into());
        let b: Vec<BigInt> = a
            .iter()
            .map(|r| {
                let v = BigRational::from_integer(r[0].clone()) * &x + BigRational::from_integer(r[1].clone()) * &y;
                v.numer().clone() * (BigInt::from(6) / v.denom())
            })
            .collect();
        // system scaled by 6 so the right side is integral
        let a6: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|c| c * 6).collect()).collect();
        let sol = solve(&a6, &b, 2).unwrap();
        assert_eq!(sol, vec![x, y]);
    }

    #[test]
    fn large_integer_solution() {
        let huge: BigInt = BigInt::from(7u32).pow(200u32) + 5u32;
        let a = big(&[&[1, 0], &[0, 1], &[1, 1]]);
        let b = vec![huge.clone(), -huge.clone(), BigInt::zero()];
        let sol = solve(&a, &b, 2).unwrap();
        assert_eq!(sol[0], BigRational::from_integer(huge.clone()));
        assert_eq!(sol[1], BigRational::from_integer(-huge));
    }

    #[test]
    fn singular_and_inconsistent() {
        let a = big(&[&[1, 2], &[2, 4], &[3, 6]]);
        let b = vec![BigInt::from(1), BigInt::from(2), BigInt::from(3)];
        assert!(matches!(solve(&a, &b, 2), Err(SolveError::Singular { rank: 1, unknowns: 2 })));
        let a = big(&[&[1, 0], &[0, 1], &[1, 1]]);
        let b = vec![BigInt::from(1), BigInt::from(1), BigInt::from(3)];
        assert_eq!(solve(&a, &b, 2), Err(SolveError::Inconsistent));
    }
}

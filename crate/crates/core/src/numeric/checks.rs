//! The sampled checks: the weight `-1/2` vector transformation under `T`
//! and `S`, the eta-quotient forms of `f_{4,beta}`, the Atkin-Lehner
//! relations `A|W = A'` and `L_alpha|W = K_alpha`, and the eta multiplier.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::eval::{
    eval_eta_quotient, eval_eta_quotient_at, eval_f4beta, eval_series, log_eta_direct, mobius, u_conjugates, Approx,
    F4Supply, Image, UpperHalfPoint,
};
use super::NumericError;
use crate::congruence::sequences::sequence_series;
use crate::congruence::{required_precision, SeqKind};
use crate::etaq::{eta_multiplier, named};
use crate::par;

/// Relative tail allowed when summing a truncated q-series.
const SERIES_TAIL: f64 = 1e-12;
/// Coefficients kept in each `K_alpha` for the Atkin-Lehner check.
pub const K_WINDOW: i64 = 80;
pub const W: [[i64; 2]; 2] = [[50, 1], [98, 2]];
/// `L_2|W = K_2` is compared at `x + i (10/3) y`. Lower down the `K_2`
/// series cancels badly in double precision (terms near `10^19` summing to
/// `10^9` at height 0.5); higher up the seven conjugates of `L_1` do.
pub const SECOND_LEVEL_LIFT: f64 = 10.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Region {
    /// Around `i`, where both `tau` and `-1/tau` are well inside the half-plane.
    pub const VECTOR: Region = Region { x: (-0.5, 0.5), y: (0.8, 1.3) };
    /// Near `-1/49`, which `W` sends close to `25/49`.
    pub const ATKIN_LEHNER: Region = Region { x: (-1.0 / 49.0 - 0.05, -1.0 / 49.0 + 0.05), y: (0.45, 0.6) };
}

pub fn samples(seed: u64, count: usize, region: Region) -> Vec<UpperHalfPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| UpperHalfPoint {
            x: rng.gen_range(region.x.0..region.x.1),
            y: rng.gen_range(region.y.0..region.y.1),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct NumericConfig {
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    /// Coefficients of each `f_{4,beta}`.
    pub terms: usize,
    pub alpha_max: u32,
    /// Repeat every sample at `x + 2iy`.
    pub two_sided: bool,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig { seed: 7, samples: 5, tolerance: 1e-8, terms: 400, alpha_max: 2, two_sided: true }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NumericReport {
    pub check: String,
    pub samples: Vec<UpperHalfPoint>,
    /// Largest relative deviation between the two sides.
    pub max_dev: f64,
    /// Largest relative error bound carried by the evaluations.
    pub error_bound: f64,
    pub tolerance: f64,
    pub terms: usize,
    pub two_sided: bool,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<String>,
}

#[derive(Default)]
struct Tally {
    max_dev: f64,
    error_bound: f64,
    worst: Option<String>,
}

impl Tally {
    fn compare(&mut self, label: String, lhs: Approx, rhs: Approx) {
        let scale = lhs.value.norm().max(rhs.value.norm()).max(f64::MIN_POSITIVE);
        let dev = (lhs.value - rhs.value).norm() / scale;
        let bound = (lhs.error + rhs.error) / scale;
        if dev > self.max_dev || self.worst.is_none() {
            self.max_dev = self.max_dev.max(dev);
            self.worst = Some(format!("{label}: relative deviation {dev:.3e}"));
        }
        self.error_bound = self.error_bound.max(bound);
    }

    fn merge(mut self, other: Tally) -> Tally {
        if other.max_dev >= self.max_dev {
            self.max_dev = other.max_dev;
            self.worst = other.worst.or(self.worst);
        }
        self.error_bound = self.error_bound.max(other.error_bound);
        self
    }

    fn report(self, check: &str, points: &[UpperHalfPoint], config: &NumericConfig, terms: usize) -> NumericReport {
        let passed = self.max_dev <= config.tolerance && self.error_bound <= config.tolerance;
        NumericReport {
            check: check.into(),
            samples: points.to_vec(),
            max_dev: self.max_dev,
            error_bound: self.error_bound,
            tolerance: config.tolerance,
            terms,
            two_sided: config.two_sided,
            passed,
            worst: if passed { None } else { self.worst },
        }
    }
}

/// The sample points themselves plus, when two-sided, their copies at doubled height.
fn expand_points(points: &[UpperHalfPoint], two_sided: bool) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = points.iter().map(|p| p.tau()).collect();
    if two_sided {
        out.extend(points.iter().map(|p| Complex64::new(p.x, 2.0 * p.y)));
    }
    out
}

fn run_points(
    points: &[UpperHalfPoint],
    two_sided: bool,
    f: impl Fn(Complex64, &mut Tally) -> Result<(), NumericError> + Sync + Send,
) -> Result<Tally, NumericError> {
    let taus = expand_points(points, two_sided);
    let tallies = par::map(&taus, |&tau| {
        let mut t = Tally::default();
        f(tau, &mut t).map(|_| t)
    });
    let mut total = Tally::default();
    for t in tallies {
        total = total.merge(t?);
    }
    Ok(total)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `diag` of the `T` action on `(f_{4,0}, f_{4,1}, f_{4,2})`.
pub fn t_matrix() -> [Complex64; 3] {
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    [c(-0.5, s3 / 2.0), c((s6 - SQRT_2) / 4.0, (s6 + SQRT_2) / 4.0), c(0.5, -s3 / 2.0)]
}

pub fn s_matrix() -> [[Complex64; 3]; 3] {
    let a = c(SQRT_2 / 4.0, SQRT_2 / 4.0);
    let b = c(SQRT_2 / 2.0, SQRT_2 / 2.0);
    let z = Complex64::new(0.0, 0.0);
    [[a, -b, a], [-a, z, a], [a, b, a]]
}

fn f_vector(z: Complex64, supply: &F4Supply) -> Result<[Approx; 3], NumericError> {
    Ok([eval_f4beta(0, z, supply, SERIES_TAIL)?, eval_f4beta(1, z, supply, SERIES_TAIL)?, eval_f4beta(2, z, supply, SERIES_TAIL)?])
}

/// `F(tau + 1) = T F(tau)` and `tau^{1/2} F(-1/tau) = S F(tau)` (weight `-1/2`).
pub fn check_vector_transform(points: &[UpperHalfPoint], config: &NumericConfig) -> Result<NumericReport, NumericError> {
    let supply = F4Supply::new(config.terms)?;
    let t = t_matrix();
    let s = s_matrix();
    let tally = run_points(points, config.two_sided, |tau, tally| {
        let f = f_vector(tau, &supply)?;
        let shifted = f_vector(tau + 1.0, &supply)?;
        let root = tau.sqrt();
        let inverted = f_vector(-tau.inv(), &supply)?;
        for i in 0..3 {
            tally.compare(format!("T row {i} at {tau}"), shifted[i], f[i].scale(t[i]));
            let mut rhs = Approx::exact(Complex64::new(0.0, 0.0));
            for j in 0..3 {
                rhs = rhs.add(f[j].scale(s[i][j]));
            }
            tally.compare(format!("S row {i} at {tau}"), inverted[i].scale(root), rhs);
        }
        Ok(())
    })?;
    Ok(tally.report("vector_transform", points, config, config.terms))
}

/// `f_{4,1} = 4 eta(2 tau)^6 / eta(tau)^7` and `(f_{4,2} - f_{4,0})(2 tau) = eta(tau)^6 / eta(2 tau)^7`.
pub fn check_eta_forms(points: &[UpperHalfPoint], config: &NumericConfig) -> Result<NumericReport, NumericError> {
    let supply = F4Supply::new(config.terms)?;
    let tally = run_points(points, config.two_sided, |tau, tally| {
        let lhs = eval_f4beta(1, tau, &supply, SERIES_TAIL)?;
        let rhs = eval_eta_quotient(&[(2, 6), (1, -7)], tau)?.scale(c(4.0, 0.0));
        tally.compare(format!("f41 at {tau}"), lhs, rhs);
        let two = tau * 2.0;
        let lhs = eval_f4beta(2, two, &supply, SERIES_TAIL)?.sub(eval_f4beta(0, two, &supply, SERIES_TAIL)?);
        let rhs = eval_eta_quotient(&[(1, 6), (2, -7)], tau)?;
        tally.compare(format!("f42 - f40 at {two}"), lhs, rhs);
        Ok(())
    })?;
    Ok(tally.report("eta_forms", points, config, config.terms))
}

/// `A(W tau) = A'(tau)`, `U_7(A)(W tau) = U_7(A')(tau)` and
/// `L_alpha(W tau) = K_alpha(tau)` for `alpha <= alpha_max`. The left sides
/// are sums over conjugates `(W tau + j) / 7^alpha`; the `K_alpha` come from
/// their exact q-expansions.
pub fn check_atkin_lehner(points: &[UpperHalfPoint], config: &NumericConfig) -> Result<NumericReport, NumericError> {
    if config.alpha_max > 2 {
        return Err(NumericError::UnsupportedAlpha(config.alpha_max));
    }
    let a = named::a();
    let a_prime = named::a_prime();
    let eval_a = |p: Image| eval_eta_quotient_at(a.factors(), p);
    let eval_a_prime = |p: Image| eval_eta_quotient_at(a_prime.factors(), p);
    let k_terms = if config.alpha_max == 0 {
        Vec::new()
    } else {
        let budget = required_precision(SeqKind::K, config.alpha_max, K_WINDOW);
        sequence_series(SeqKind::K, config.alpha_max, budget.start())?
    };
    let terms = k_terms.last().map(|s| s.precision() as usize).unwrap_or(0);
    let tally = run_points(points, config.two_sided, |tau, tally| {
        let w_tau = Image::of(tau).then(W);
        tally.compare(format!("A|W at {tau}"), eval_a(w_tau)?, eval_a_prime(Image::of(tau))?);
        let lhs = u_conjugates(7, w_tau, &eval_a)?;
        let rhs = u_conjugates(7, Image::of(tau), &eval_a_prime)?;
        tally.compare(format!("U7(A)|W at {tau}"), lhs, rhs);
        for (i, k) in k_terms.iter().enumerate() {
            let alpha = i as u32 + 1;
            let at = if alpha == 2 { Complex64::new(tau.re, tau.im * SECOND_LEVEL_LIFT) } else { tau };
            let lhs = u_conjugates(7u64.pow(alpha), Image::of(at).then(W), &eval_a)?;
            let rhs = eval_series(k, at, SERIES_TAIL)?;
            tally.compare(format!("L{alpha}|W at {at}"), lhs, rhs);
        }
        Ok(())
    })?;
    Ok(tally.report("atkin_lehner", points, config, terms))
}

/// A random element of `SL_2(Z)` with `|c|, |d| <= 6`.
fn random_sl2(rng: &mut ChaCha8Rng) -> [[i64; 2]; 2] {
    loop {
        let c: i64 = rng.gen_range(-6..=6);
        let d: i64 = rng.gen_range(-6..=6);
        let g = c.extended_gcd(&d);
        if g.gcd != 1 {
            continue;
        }
        // a d - b c = 1 from x c + y d = 1
        let (a, b) = (g.y, -g.x);
        let t: i64 = rng.gen_range(-3..=3);
        return [[a + t * c, b + t * d], [c, d]];
    }
}

/// `eta(M tau) = nu(M) (c tau + d)^{1/2} eta(tau)` for 50 seeded matrices,
/// both sides from the plain product.
pub fn check_multiplier_law(points: &[UpperHalfPoint], config: &NumericConfig) -> Result<NumericReport, NumericError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let matrices: Vec<[[i64; 2]; 2]> = (0..50).map(|_| random_sl2(&mut rng)).collect();
    let mut nus = Vec::with_capacity(matrices.len());
    for m in &matrices {
        nus.push(Complex64::from_polar(1.0, PI * eta_multiplier(*m)? as f64 / 12.0));
    }
    let tally = run_points(points, config.two_sided, |tau, tally| {
        let eta = log_eta_direct(tau)?.exp();
        for (m, nu) in matrices.iter().zip(&nus) {
            let lhs = log_eta_direct(mobius(*m, tau))?.exp();
            let factor = (tau * m[1][0] as f64 + m[1][1] as f64).sqrt() * nu;
            tally.compare(format!("{m:?} at {tau}"), lhs, eta.scale(factor));
        }
        Ok(())
    })?;
    Ok(tally.report("eta_multiplier", points, config, matrices.len()))
}

/// Every check on seeded samples: the half-plane checks use `Region::VECTOR`,
/// the Atkin-Lehner check `Region::ATKIN_LEHNER`.
pub fn run_all(config: &NumericConfig) -> Result<Vec<NumericReport>, NumericError> {
    let near_i = samples(config.seed, config.samples, Region::VECTOR);
    let near_cusp = samples(config.seed.wrapping_add(1), config.samples, Region::ATKIN_LEHNER);
    Ok(vec![
        check_vector_transform(&near_i, config)?,
        check_eta_forms(&near_i, config)?,
        check_multiplier_law(&near_i, config)?,
        check_atkin_lehner(&near_cusp, config)?,
    ])
}

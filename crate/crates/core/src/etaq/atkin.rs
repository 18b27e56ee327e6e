//! Atkin–Lehner matrices and the symbolic image of weight-0 eta quotients.

use num_integer::Integer;
use num_rational::Ratio;

use super::{EtaError, EtaQuotient};

/// `((a e, b), (c N, d e))` with determinant `e`, where `e || N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AtkinLehnerMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub e: u64,
    pub n: u64,
}

impl AtkinLehnerMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64, e: u64, n: u64) -> Result<Self, EtaError> {
        if e == 0 || !n.is_multiple_of(e) {
            return Err(EtaError::InvalidAtkinLehner(format!("e = {e} does not divide N = {n}")));
        }
        if e.gcd(&(n / e)) != 1 {
            return Err(EtaError::InvalidAtkinLehner(format!(
                "e = {e} does not divide N = {n} exactly (gcd(e, N/e) = {})",
                e.gcd(&(n / e))
            )));
        }
        let (ei, ni) = (e as i64, n as i64);
        let det = a * d * ei * ei - b * c * ni;
        if det != ei {
            return Err(EtaError::InvalidAtkinLehner(format!("determinant {det}, expected {e}")));
        }
        Ok(AtkinLehnerMatrix { a, b, c, d, e, n })
    }

    /// Recovers `(a, b, c, d)` from explicit entries `((m11, m12), (m21, m22))`.
    pub fn from_entries(m: [[i64; 2]; 2], e: u64, n: u64) -> Result<Self, EtaError> {
        let (ei, ni) = (e as i64, n as i64);
        if e == 0 || m[0][0] % ei != 0 || m[1][1] % ei != 0 || m[1][0] % ni != 0 {
            return Err(EtaError::InvalidAtkinLehner(format!(
                "entries {m:?} are not of the shape ((ae, b), (cN, de)) for e = {e}, N = {n}"
            )));
        }
        Self::new(m[0][0] / ei, m[0][1], m[1][0] / ni, m[1][1] / ei, e, n)
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        let (ei, ni) = (self.e as i64, self.n as i64);
        [[self.a * ei, self.b], [self.c * ni, self.d * ei]]
    }

    /// Level map `delta -> e delta / gcd(e, delta)^2`.
    pub fn map_level(&self, delta: u64) -> u64 {
        let g = self.e.gcd(&delta);
        self.e * delta / (g * g)
    }
}

/// Symbolic image under `W` plus the real scalar it predicts:
/// `eq(W tau) = scale * image(tau)` where `scale^2 = prod gcd(e, delta)^{-r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtkinLehnerImage {
    pub image: EtaQuotient,
    pub matrix: AtkinLehnerMatrix,
    pub scale_squared: Ratio<i64>,
}

impl AtkinLehnerImage {
    pub fn scale(&self) -> f64 {
        let s = *self.scale_squared.numer() as f64 / *self.scale_squared.denom() as f64;
        s.sqrt()
    }
}

impl EtaQuotient {
    pub fn atkin_lehner_image(&self, w: &AtkinLehnerMatrix) -> Result<AtkinLehnerImage, EtaError> {
        if self.weight_times_two() != 0 {
            return Err(EtaError::NonzeroWeight { numer: self.weight_times_two() });
        }
        let mut scale_squared = Ratio::from_integer(1i64);
        let mut factors = Vec::new();
        for &(d, r) in self.factors() {
            if !w.n.is_multiple_of(d) {
                return Err(EtaError::LevelMismatch { level: d, declared: w.n });
            }
            let g = w.e.gcd(&d) as i64;
            scale_squared *= Ratio::from_integer(g).pow(-r as i32);
            factors.push((w.map_level(d), r));
        }
        Ok(AtkinLehnerImage {
            image: EtaQuotient::with_level(&factors, w.n)?,
            matrix: *w,
            scale_squared,
        })
    }
}

//! Coefficient supplies for `c phi_4` and `c psi_{4,beta}`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::CongruenceError;
use crate::etaq::{named, EtaQuotient};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Cphi4,
    Cpsi40,
    Cpsi41,
    Cpsi42,
}

impl Family {
    pub fn beta(self) -> Option<u32> {
        match self {
            Family::Cphi4 => None,
            Family::Cpsi40 => Some(0),
            Family::Cpsi41 => Some(1),
            Family::Cpsi42 => Some(2),
        }
    }

    pub fn of_beta(beta: u32) -> Option<Family> {
        match beta {
            0 => Some(Family::Cpsi40),
            1 => Some(Family::Cpsi41),
            2 => Some(Family::Cpsi42),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyCoefficients {
    pub family: Family,
    pub values: Vec<BigInt>,
    /// The generating function the values were read from.
    pub source: String,
}

impl FamilyCoefficients {
    pub fn get(&self, n: usize) -> Option<&BigInt> {
        self.values.get(n)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `c psi_{4,1}(0..n)` from `4 (q^2;q^2)^6 / (q;q)^7`.
pub fn cpsi41_coefficients(n: usize) -> FamilyCoefficients {
    let core = named::cpsi41_core();
    let (_, series) = core.expand(n.max(1));
    let values = series.numerators().iter().map(|c| c * 4).take(n).collect();
    FamilyCoefficients { family: Family::Cpsi41, values, source: format!("4*[{core}]") }
}

/// `c phi_4(0..n)` from the two-quotient formula: the `q^{1/6}` prefactor
/// must cancel each quotient's own prefactor to an integer power of `q`.
pub fn cphi4_coefficients(n: usize) -> Result<FamilyCoefficients, CongruenceError> {
    let n = n.max(1);
    let first = EtaQuotient::new(&[(4, 15), (8, -6), (2, -6), (1, -4)]);
    let second = EtaQuotient::new(&[(8, 2), (4, 3), (2, -2), (1, -4)]);
    let mut values = vec![BigInt::zero(); n];
    for (eq, mult) in [(&first, 1), (&second, 12)] {
        // q^{1/6} is 4/24
        let shift_24 = eq.prefactor_24() + 4;
        if shift_24 % 24 != 0 || shift_24 < 0 {
            return Err(CongruenceError::PrefactorMismatch { prefactor_24: shift_24 });
        }
        let shift = (shift_24 / 24) as usize;
        if shift >= n {
            continue;
        }
        let (_, series) = eq.expand(n - shift);
        for (i, c) in series.numerators().iter().enumerate() {
            values[i + shift] += c * mult;
        }
    }
    Ok(FamilyCoefficients {
        family: Family::Cphi4,
        values,
        source: format!("q^(1/6)*[{first}] + 12*q^(1/6)*[{second}]"),
    })
}

/// `(c psi_{4,0}(0..n), c psi_{4,2}(0..n))` read off the even and odd parts
/// of `(q;q)^6 / (q^2;q^2)^7 = C Psi_{4,2}(q^2) - q C Psi_{4,0}(q^2)`.
pub fn cpsi40_42_coefficients(n: usize) -> Result<(FamilyCoefficients, FamilyCoefficients), CongruenceError> {
    let core = named::cpsi40_42_core();
    let (_, series) = core.expand(2 * n.max(1));
    let nums = series.numerators();
    let mut psi0 = Vec::with_capacity(n);
    let mut psi2 = Vec::with_capacity(n);
    for i in 0..n {
        let even = nums.get(2 * i).cloned().unwrap_or_default();
        let odd = nums.get(2 * i + 1).cloned().unwrap_or_default();
        if even.is_negative() {
            return Err(CongruenceError::SignViolation { exponent: 2 * i as i64, value: even.to_string() });
        }
        if odd.is_positive() {
            return Err(CongruenceError::SignViolation { exponent: 2 * i as i64 + 1, value: odd.to_string() });
        }
        psi2.push(even);
        psi0.push(-odd);
    }
    let source = format!("[{core}]");
    Ok((
        FamilyCoefficients { family: Family::Cpsi40, values: psi0, source: format!("-odd part of {source}") },
        FamilyCoefficients { family: Family::Cpsi42, values: psi2, source: format!("even part of {source}") },
    ))
}

/// Coefficients for `beta` from the generating function the theorem names.
pub fn cpsi4_coefficients(beta: u32, n: usize) -> Result<FamilyCoefficients, CongruenceError> {
    match beta {
        1 => Ok(cpsi41_coefficients(n)),
        0 => Ok(cpsi40_42_coefficients(n)?.0),
        2 => Ok(cpsi40_42_coefficients(n)?.1),
        _ => Err(CongruenceError::InvalidBeta(beta)),
    }
}

//! Finite sweeps of `c psi_{4,beta}(7^(2a-1) n + lambda) = 0 (mod 7^a)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use super::families::{cphi4_coefficients, cpsi4_coefficients};
use super::lambda::{beta2_divided_by_six, lambda};
use super::CongruenceError;
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateBounds {
    pub class_modulus: u64,
    pub divisor: u64,
    /// Largest coefficient index inspected.
    pub max_index: u64,
    pub lambda_closed_form: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceCertificate {
    pub family: String,
    pub beta: u32,
    pub alpha: u32,
    pub lambda: u64,
    pub modulus_class: String,
    pub divisor: String,
    pub n_checked: [u64; 2],
    pub status: String,
    /// Coefficients generated.
    pub precision: u64,
    pub bounds: CertificateBounds,
    pub source: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn notes_for(beta: u32, alpha: u32, cphi4_agrees: Option<bool>) -> Vec<String> {
    let mut notes = Vec::new();
    if beta == 2 {
        let k = 2 * alpha - 1;
        notes.push(format!(
            "printed closed form (1+5*7^{k})/8 is not an integer; lambda is the least n with 24n = 4 (mod 7^{k}), which equals (1+5*7^{k})/6 = {}",
            beta2_divided_by_six(k)
        ));
        match cphi4_agrees {
            Some(true) => notes.push("c psi_(4,2)(n) = c phi_4(n) on every inspected index, so this also certifies c phi_4".into()),
            Some(false) => notes.push("c psi_(4,2) and c phi_4 disagree on the inspected indices".into()),
            None => {}
        }
    }
    notes
}

/// Checks `7^alpha | c psi_{4,beta}(7^(2 alpha - 1) n + lambda)` for
/// `0 <= n < n_max`.
pub fn verify_theorem(beta: u32, alpha: u32, n_max: u64) -> Result<CongruenceCertificate, CongruenceError> {
    if beta > 2 {
        return Err(CongruenceError::InvalidBeta(beta));
    }
    if alpha == 0 {
        return Err(CongruenceError::InvalidAlpha);
    }
    let class = lambda(beta, 2 * alpha - 1);
    let modulus = 7u64.pow(2 * alpha - 1);
    let lam = class.lambda_u64().expect("lambda fits in u64");
    let divisor = 7u64.pow(alpha);
    let max_index = if n_max == 0 { lam } else { modulus * (n_max - 1) + lam };
    let supply = max_index as usize + 1;
    let coeffs = cpsi4_coefficients(beta, supply)?;
    if coeffs.len() < supply {
        return Err(CongruenceError::InsufficientCoefficients { needed: supply, got: coeffs.len() });
    }
    let ns: Vec<u64> = (0..n_max).collect();
    let d = BigInt::from(divisor);
    let failures = par::map(&ns, |&n| {
        let index = modulus * n + lam;
        let value = &coeffs.values[index as usize];
        (!value.mod_floor(&d).is_zero()).then(|| (index, value.to_string()))
    });
    if let Some((index, value)) = failures.into_iter().flatten().next() {
        return Err(CongruenceError::CounterexampleFound { beta, alpha, n: index, value });
    }
    let cphi4_agrees = if beta == 2 {
        let phi = cphi4_coefficients(supply)?;
        Some(ns.iter().all(|&n| {
            let i = (modulus * n + lam) as usize;
            phi.values[i] == coeffs.values[i]
        }))
    } else {
        None
    };
    Ok(CongruenceCertificate {
        family: "cpsi4".into(),
        beta,
        alpha,
        lambda: lam,
        modulus_class: format!("7^{}", 2 * alpha - 1),
        divisor: format!("7^{alpha}"),
        n_checked: [0, n_max.saturating_sub(1)],
        status: "verified".into(),
        precision: supply as u64,
        bounds: CertificateBounds {
            class_modulus: modulus,
            divisor,
            max_index,
            lambda_closed_form: class.closed_form.as_ref().map(|c| c.to_string()),
        },
        source: coeffs.source.clone(),
        notes: notes_for(beta, alpha, cphi4_agrees),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramanujan_class_for_beta_two() {
        let c = verify_theorem(2, 1, 70).unwrap();
        assert_eq!((c.lambda, c.bounds.class_modulus, c.bounds.max_index), (6, 7, 7 * 69 + 6));
        assert_eq!(c.status, "verified");
        assert!(c.notes.iter().any(|n| n.contains("c phi_4")));
        assert!(c.bounds.lambda_closed_form.is_none());
    }

    #[test]
    fn second_level_beta_one() {
        let c = verify_theorem(1, 2, 6).unwrap();
        assert_eq!((c.lambda, c.modulus_class.as_str(), c.divisor.as_str()), (157, "7^3", "7^2"));
        assert_eq!(c.bounds.lambda_closed_form.as_deref(), Some("157"));
    }

    #[test]
    fn bad_arguments() {
        assert!(matches!(verify_theorem(3, 1, 5), Err(CongruenceError::InvalidBeta(3))));
        assert!(matches!(verify_theorem(1, 0, 5), Err(CongruenceError::InvalidAlpha)));
    }

    #[test]
    fn json_shape() {
        let c = verify_theorem(0, 1, 10).unwrap();
        let v: serde_json::Value = serde_json::to_value(&c).unwrap();
        assert_eq!(v["family"], "cpsi4");
        assert_eq!(v["lambda"], 2);
        assert_eq!(v["n_checked"], serde_json::json!([0, 9]));
        assert!(v["bounds"].is_object());
    }
}

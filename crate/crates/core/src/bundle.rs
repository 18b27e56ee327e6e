//! The certificate bundle: theorem sweeps, the `L`/`K` sequence checks,
//! the induction divisibility check and the numeric checks in one
//! deterministic document.

use serde::Serialize;

use crate::congruence::sequences::{induction_divisibility, sequence_with, DivisibilityCheck, SequenceReport, Structure, MIN_WINDOW};
use crate::congruence::{required_precision, verify_theorem, CongruenceCertificate, CongruenceError, SeqKind};
use crate::numeric::{self, NumericConfig, NumericError, NumericReport};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BundleConfig {
    pub betas: Vec<u32>,
    pub alpha_max: u32,
    /// Residues `n` swept per certificate.
    pub n_max: u64,
    /// Starting precision of the `L`/`K` runs; the smallest admissible one
    /// when absent.
    pub start: Option<i64>,
    pub window: i64,
    pub seed: u64,
    pub tolerance: f64,
    pub numeric: bool,
}

impl Default for BundleConfig {
    fn default() -> Self {
        BundleConfig {
            betas: vec![0, 1, 2],
            alpha_max: 2,
            n_max: 10,
            start: None,
            window: MIN_WINDOW,
            seed: 7,
            tolerance: 1e-8,
            numeric: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceRun {
    pub sequence: String,
    pub start: i64,
    pub terms: Vec<SequenceReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateBundle {
    pub config: BundleConfig,
    pub certificates: Vec<CongruenceCertificate>,
    pub sequences: Vec<SequenceRun>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub induction: Option<DivisibilityCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub numeric: Vec<NumericReport>,
    pub status: String,
}

impl CertificateBundle {
    pub fn verified(&self) -> bool {
        self.status == "verified"
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BundleError {
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Sequences that carry the congruences for `beta`: `L` for 1, `K` for 0 and 2.
fn kinds_for(betas: &[u32]) -> Vec<SeqKind> {
    let mut kinds = Vec::new();
    if betas.contains(&1) {
        kinds.push(SeqKind::L);
    }
    if betas.iter().any(|&b| b == 0 || b == 2) {
        kinds.push(SeqKind::K);
    }
    kinds
}

/// Builds the bundle, reporting each stage through `progress`. Budgets are
/// checked before anything is computed.
pub fn certify(config: &BundleConfig, progress: &dyn Fn(&str)) -> Result<CertificateBundle, BundleError> {
    if config.alpha_max == 0 {
        return Err(CongruenceError::InvalidAlpha.into());
    }
    if let Some(&b) = config.betas.iter().find(|&&b| b > 2) {
        return Err(CongruenceError::InvalidBeta(b).into());
    }
    let kinds = kinds_for(&config.betas);
    let mut starts = Vec::new();
    for &kind in &kinds {
        let need = required_precision(kind, config.alpha_max, config.window);
        let start = config.start.unwrap_or(need.start());
        if start < need.start() {
            let got = crate::congruence::sequences::precisions_from(kind, config.alpha_max, start)
                [config.alpha_max as usize]
                - kind.low(config.alpha_max);
            return Err(CongruenceError::UnderBudget {
                sequence: kind.label().into(),
                alpha: config.alpha_max,
                got,
                needed: config.window,
            }
            .into());
        }
        starts.push(start);
    }

    let mut certificates = Vec::new();
    for &beta in &config.betas {
        for alpha in 1..=config.alpha_max {
            progress(&format!("sweeping beta={beta} alpha={alpha} over {} residues", config.n_max));
            certificates.push(verify_theorem(beta, alpha, config.n_max)?);
        }
    }

    let mut sequences = Vec::new();
    let mut induction = None;
    if !kinds.is_empty() {
        progress(&format!("building basis tables to alpha={}", config.alpha_max));
        let structure = Structure::build(config.alpha_max)?;
        for (&kind, &start) in kinds.iter().zip(&starts) {
            progress(&format!("checking {}_1..{}_{} from precision {start}", kind.label(), kind.label(), config.alpha_max));
            let terms = sequence_with(kind, config.alpha_max, start, config.window, &structure)?;
            sequences.push(SequenceRun {
                sequence: kind.label().into(),
                start,
                terms: terms.iter().map(|t| t.report()).collect(),
            });
        }
        progress("checking the induction divisibility");
        induction = Some(induction_divisibility(&structure)?);
    }

    let mut numeric_reports = Vec::new();
    if config.numeric {
        progress("running numeric checks");
        let nc = NumericConfig {
            seed: config.seed,
            tolerance: config.tolerance,
            alpha_max: config.alpha_max.min(2),
            ..NumericConfig::default()
        };
        numeric_reports = numeric::run_all(&nc)?;
    }

    let ok = induction.as_ref().is_none_or(|d| d.divisible)
        && numeric_reports.iter().all(|r| r.passed)
        && sequences.iter().flat_map(|s| &s.terms).all(|t| t.membership.as_ref().is_none_or(|m| m.member));
    Ok(CertificateBundle {
        config: config.clone(),
        certificates,
        sequences,
        induction,
        numeric: numeric_reports,
        status: if ok { "verified" } else { "failed" }.into(),
    })
}

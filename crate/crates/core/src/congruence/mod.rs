//! Generating functions for `c phi_4` and `c psi_{4,beta}`, the residue
//! classes, the sequences `L_alpha` / `K_alpha` with their valuation and
//! lattice checks, and theorem certificates.

pub mod certificate;
pub mod families;
pub mod lambda;
pub mod sequences;
pub mod xspace;

pub use certificate::{verify_theorem, CongruenceCertificate};
pub use families::{cphi4_coefficients, cpsi40_42_coefficients, cpsi41_coefficients, cpsi4_coefficients, Family, FamilyCoefficients};
pub use lambda::{lambda, LambdaClass};
pub use sequences::{k_sequence, l_sequence, required_precision, Budget, SeqKind, SequenceTerm};
pub use xspace::{x_membership, MembershipVerdict, Space, XSpaceProfile};

use thiserror::Error;

use crate::etaq::EtaError;
use crate::operators::OperatorError;
use crate::qseries::SeriesError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CongruenceError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Eta(#[from] EtaError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("q-power bookkeeping left a prefactor of q^({prefactor_24}/24)")]
    PrefactorMismatch { prefactor_24: i64 },
    #[error("coefficient of q^{exponent} has the wrong sign: {value}")]
    SignViolation { exponent: i64, value: String },
    #[error("beta must be 0, 1 or 2, got {0}")]
    InvalidBeta(u32),
    #[error("alpha must be positive")]
    InvalidAlpha,
    #[error("{sequence}_{alpha}: extraction identity fails at q^{exponent}")]
    ExtractionMismatch { sequence: String, alpha: u32, exponent: i64 },
    #[error("{sequence}_{alpha}: coefficient of q^{exponent} has 7-adic valuation {valuation}, below {floor}")]
    ValuationFailure { sequence: String, alpha: u32, exponent: i64, valuation: String, floor: i64 },
    #[error("{sequence}_{alpha}: not in {space}, part {part} degree {degree}: {reason}")]
    MembershipFailure { sequence: String, alpha: u32, space: String, part: usize, degree: i64, reason: String },
    #[error("{sequence}_{alpha}: decompositions disagree ({detail})")]
    DecompositionMismatch { sequence: String, alpha: u32, detail: String },
    #[error("{sequence}_{alpha} keeps {got} coefficients, need {needed}; raise the starting precision")]
    UnderBudget { sequence: String, alpha: u32, got: i64, needed: i64 },
    #[error("need {needed} coefficients, have {got}")]
    InsufficientCoefficients { needed: usize, got: usize },
    #[error("counterexample: c psi_(4,{beta})({n}) = {value} is not divisible by 7^{alpha}")]
    CounterexampleFound { beta: u32, alpha: u32, n: u64, value: String },
}

//! Floating-point cross-checks of the modular transformation laws at
//! sampled points of the upper half-plane.

pub mod checks;
pub mod eval;

pub use checks::{
    check_atkin_lehner, check_eta_forms, check_multiplier_law, check_vector_transform, run_all, samples,
    NumericConfig, NumericReport, Region,
};
pub use eval::{
    eval_eta, eval_eta_quotient, eval_eta_quotient_at, eval_f4beta, log_eta, log_eta_direct, log_eta_image, Approx, F4Supply,
    Image, UpperHalfPoint,
};

use thiserror::Error;

use crate::congruence::CongruenceError;
use crate::etaq::EtaError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NumericError {
    #[error("Im(tau) = {y} is below the safe region")]
    OutsideSafeRegion { y: f64 },
    #[error("eta product needs {needed} factors, cap is {cap}")]
    ConvergenceBudgetExceeded { needed: usize, cap: usize },
    #[error("series tail estimate {tail:e} exceeds {limit:e}; use more terms or a larger Im(tau)")]
    TailTooLarge { tail: f64, limit: f64 },
    #[error("beta must be 0, 1 or 2, got {0}")]
    InvalidBeta(u32),
    #[error("the Atkin-Lehner check supports alpha <= 2, got {0}")]
    UnsupportedAlpha(u32),
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error(transparent)]
    Eta(#[from] EtaError),
}

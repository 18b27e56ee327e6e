//! Exact q-series engine for eta quotients, the `U_7` operator on the
//! `Gamma_0(14)` basis and congruences modulo powers of 7 for 4-colored
//! generalized Frobenius partitions.

pub mod bundle;
pub mod congruence;
pub mod par;
pub mod etaq;
pub mod numeric;
pub mod operators;
pub mod qseries;

pub use qseries::{euler_product, seven_adic_valuation, QSeries, SeriesError, Valuation};

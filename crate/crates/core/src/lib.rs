//! Effective Hamiltonians for periodic homogenization of Hamilton-Jacobi
//! equations, and the inverse problem of recovering the potential from them.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asympt;
pub mod cellpde;
pub mod curve;
pub mod error;
pub mod experiments;
pub mod ham1d;
pub mod hill;
pub mod inviscid1d;
pub mod numerics;
pub mod plot;
pub mod potential;
pub mod report;

pub use curve::{CurveSample, EffectiveCurve, Method};
pub use error::{Error, Result};

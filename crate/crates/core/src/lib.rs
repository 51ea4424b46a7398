//! Numerical posterior error control.
//!
//! A Bayesian inverse problem evaluated through a numerical solver has a
//! numerical posterior, not the theoretical one. If every forward-map value
//! is within `K0` of the exact one, the expected absolute Bayes factor
//! deviation between the two posteriors is at most
//! `n K0 factor / (sqrt(2 pi) sigma*)`. This crate turns that bound around:
//! [`bound`] computes the admissible `K0` for a chosen EABF level, and the
//! solvers in [`ode`] and [`burgers`] refine their discretization until their
//! own error estimate is within it. [`sampler`] runs MCMC on the result and
//! [`experiments`] compares fine and error-controlled chains end to end.

// negated comparisons are how NaN arguments get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bound;
pub mod burgers;
pub mod error;
pub mod experiments;
pub mod forward;
pub mod model;
pub mod ode;
pub mod oracles;
pub mod sampler;

pub use error::{Error, Result};

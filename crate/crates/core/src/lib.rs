//! Numerical lab for 3D Boussinesq perturbations of stratified Couette flow,
//! written in the sheared frame `(x - yt, y, z)`.
//!
//! The crate is organised bottom-up: [`spectral_core`] holds the Fourier
//! representation and operators, [`multipliers`] the ghost weights, and the
//! remaining modules build linear propagation, the dispersive zero-mode
//! semigroup, the full nonlinear solver and the experiment harness on top.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersive;
pub mod error;
pub mod harness;
pub mod linear_dynamics;
pub mod multipliers;
pub mod nonlinear_solver;
pub mod quadrature;
pub mod series;
pub mod spectral_core;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use series::DiagnosticsSeries;

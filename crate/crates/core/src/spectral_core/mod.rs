//! Fourier representation on `T x [-Ly/2, Ly/2) x T`, sheared-frame
//! derivatives, mode projections, dealiased products and norms.
//!
//! Coefficients are normalised so that `f(x) = sum c(k,eta,l) e^{i(kx+eta y+lz)}`
//! and all L^p norms use the unit-measure (averaged) box.

mod field;
mod grid;
mod norms;
mod ops;
mod transform;

pub use field::SpectralField;
pub use grid::{Grid, ModeClass, WaveVector};
pub use norms::{l1_norm, linf_norm, sobolev_norm, w_s1_norm};
pub use ops::{
    dealias_product, dealias_truncate, fractional_multiplier, leray_project, moving_derivative, project_modes, Axis,
    Symbol,
};
pub use transform::{forward_complex, forward_transform, inverse_complex, inverse_transform};

//! Per-mode linear dynamics of `(U^1, U^3, G, Gamma)`, the symmetric energy
//! functional, the zero-mode spectrum, the lift-up comparison and rate fits.

mod energy;
mod fit;
mod liftup;
mod propagate;
mod system;
mod zero_mode;

pub use energy::{energy_from_table, energy_functional, energy_rate, EnergyReport};
pub use fit::{fit_window, rate_fit, FitModel, FitResult};
pub use liftup::{liftup_diagnostic, zero_mode_exact, LiftupReport, ZeroModeData};
pub use propagate::{propagate_linear, LinearFields, LinearRun, LINEAR_COLUMNS};
pub(crate) use system::{coupling_rhs, sheared_norm_integral};
pub use system::{linear_matrix, linear_rhs, linear_rhs_nonzero, LinearModeSystem, LinearPhysics};
pub use zero_mode::{zero_mode_matrix, zero_mode_spectrum, ZeroModeSpectrum};

//! Zero-mode dispersion: the semigroup of `L = nu Delta - beta R` with
//! `R = i |d_z| |grad_{y,z}|^{-1}`, its sup-norm decay, the oscillatory
//! integrals behind it, and the Duhamel split of `U^2_0`.

mod duhamel;
mod line;
mod phase;
mod semigroup;

pub use duhamel::{duhamel_decompose, upsilon, upsilon_forcing, DuhamelAccumulator, DuhamelSplit};
pub use line::{
    composite_decay_scan, line_semigroup, line_w_s1_norm, littlewood_paley_dagger, littlewood_paley_project,
    lp_band_range, sup_decay_scan, Line, DECAY_COLUMNS,
};
pub use phase::{
    bump, bump_dagger, bump_tilde, decay_fit, oracle_support, resonant_band_start, stationary_phase_oracle, DecayFit,
    PhaseFunction,
};
pub use semigroup::{project_simple_zero, semigroup_apply, DispersiveOperator};

#![allow(dead_code)]

use rand::Rng;
use stratflow::spectral_core::{Grid, SpectralField};
use stratflow::Complex64;

/// Random Hermitian field supported on retained modes, optionally only `k != 0`.
pub fn random_field<R: Rng>(grid: Grid, rng: &mut R, nonzero_only: bool) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    for i in 0..grid.len() {
        let w = grid.wave_vector(i);
        if !grid.is_retained(i) || grid.is_nyquist(i) || (nonzero_only && w.k == 0) {
            continue;
        }
        let p = grid.partner(i);
        if p < i {
            continue;
        }
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (ix, iy, iz) = grid.unravel(i);
        f.set_hermitian(grid.k_of(ix), grid.n_of(iy), grid.l_of(iz), c).unwrap();
    }
    f
}

/// Random real, `grad_L`-solenoidal primitive fields at time `t`, scaled by `amp`.
pub fn random_primitive<R: Rng>(grid: Grid, rng: &mut R, t: f64, amp: f64) -> stratflow::nonlinear_solver::Primitive {
    use stratflow::spectral_core::leray_project;
    let a = random_field(grid, rng, false);
    let b = random_field(grid, rng, false);
    let c = random_field(grid, rng, false);
    let [u1, u2, u3] = leray_project([&a, &b, &c], t).unwrap();
    let theta = random_field(grid, rng, false);
    stratflow::nonlinear_solver::Primitive { u: [u1.scale(amp), u2.scale(amp), u3.scale(amp)], theta: theta.scale(amp) }
}

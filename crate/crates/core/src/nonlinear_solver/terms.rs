use super::state::FlowState;
use crate::error::Result;
use crate::spectral_core::{dealias_truncate, forward_complex, inverse_complex, Grid, SpectralField, WaveVector};
use num_complex::Complex64;
use rayon::prelude::*;

type C = Complex64;

/// Nonlinear tendencies of one state.  `t_u*` and `t_theta` are the raw
/// transport terms `-(U . grad_L) F`; the starred/circled terms carry the
/// fractional prefactors of the symmetric variables.
#[derive(Clone, Debug)]
pub struct NonlinearTendencies {
    pub t_u1: SpectralField,
    pub t_u2: SpectralField,
    pub t_u3: SpectralField,
    pub t_theta: SpectralField,
    pub pressure: SpectralField,
    pub t_star: SpectralField,
    pub t_circ: SpectralField,
    pub p_star: SpectralField,
    /// `d_y (U^2 Theta)-bar_0` on the double-zero modes.
    pub theta_flux: SpectralField,
}

fn to_physical(f: &SpectralField) -> Vec<C> {
    let mut f = dealias_truncate(f);
    f.clear_nyquist();
    inverse_complex(&f)
}

fn to_spectral(data: Vec<C>, grid: Grid) -> Result<SpectralField> {
    let mut f = dealias_truncate(&forward_complex(data, grid)?);
    f.clear_nyquist();
    Ok(f)
}

#[inline]
fn grad_components(w: WaveVector, t: f64) -> [f64; 3] {
    [w.k as f64, w.sheared_eta(t), w.l as f64]
}

fn derivative(f: &SpectralField, axis: usize, t: f64) -> SpectralField {
    f.map_symbol(|w: WaveVector| C::new(0.0, grad_components(w, t)[axis]))
}

/// `-(U . grad_L) F` in physical space, given `U` there.
fn transport_physical(u: &[Vec<C>; 3], f: &SpectralField, t: f64) -> Result<SpectralField> {
    let grid = f.grid;
    let d: Vec<Vec<C>> = (0..3).into_par_iter().map(|a| to_physical(&derivative(f, a, t))).collect();
    let prod: Vec<C> =
        (0..grid.len()).into_par_iter().map(|i| -(u[0][i] * d[0][i] + u[1][i] * d[1][i] + u[2][i] * d[2][i])).collect();
    to_spectral(prod, grid)
}

fn pressure_physical(u: &[Vec<C>; 3], grid: Grid, t: f64) -> Result<SpectralField> {
    const PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
    let products: Vec<SpectralField> = PAIRS
        .par_iter()
        .map(|&(a, b)| {
            let p: Vec<C> = u[a].iter().zip(&u[b]).map(|(x, y)| x * y).collect();
            to_spectral(p, grid)
        })
        .collect::<Result<_>>()?;
    let coeffs = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let w = grid.wave_vector(i);
            let q2 = w.sheared_norm_sq(t);
            if q2 == 0.0 {
                return C::new(0.0, 0.0);
            }
            let v = grad_components(w, t);
            PAIRS
                .iter()
                .zip(&products)
                .map(|(&(a, b), p)| p.coeffs[i] * (v[a] * v[b] * if a == b { 1.0 } else { 2.0 } / q2))
                .sum()
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs)
}

/// `-(U . grad_L) F`, dealiased.
pub fn transport(u: [&SpectralField; 3], f: &SpectralField, t: f64) -> Result<SpectralField> {
    for c in u {
        f.check_grid(c)?;
    }
    let phys = [to_physical(u[0]), to_physical(u[1]), to_physical(u[2])];
    transport_physical(&phys, f, t)
}

/// `P(U,U) = -|grad_L|^{-2} (grad_L x grad_L) : (U x U)`, from the six
/// symmetric products.
pub fn pressure(u: [&SpectralField; 3], t: f64) -> Result<SpectralField> {
    u[0].check_grid(u[1])?;
    u[0].check_grid(u[2])?;
    let phys = [to_physical(u[0]), to_physical(u[1]), to_physical(u[2])];
    pressure_physical(&phys, u[0].grid, t)
}

/// `|grad_xz|^{-1/2} |grad_L|^{3/2}` after dropping the x-z mean.
pub fn star_prefactor(f: &SpectralField, t: f64) -> SpectralField {
    f.map_symbol(|w: WaveVector| {
        let qxz = w.xz_norm();
        if qxz == 0.0 {
            C::new(0.0, 0.0)
        } else {
            C::new(w.sheared_norm_sq(t).powf(0.75) / qxz.sqrt(), 0.0)
        }
    })
}

/// `|grad_xz|^{1/2} |grad_L|^{1/2}` after dropping the x-z mean.
pub fn circ_prefactor(f: &SpectralField, t: f64) -> SpectralField {
    f.map_symbol(|w: WaveVector| C::new((w.xz_norm() * w.sheared_norm_sq(t).sqrt()).sqrt(), 0.0))
}

pub fn t_star(u: [&SpectralField; 3], f: &SpectralField, t: f64) -> Result<SpectralField> {
    Ok(star_prefactor(&transport(u, f, t)?, t).scale(-1.0))
}

pub fn t_circ(u: [&SpectralField; 3], f: &SpectralField, t: f64) -> Result<SpectralField> {
    Ok(circ_prefactor(&transport(u, f, t)?, t))
}

pub fn p_star(u: [&SpectralField; 3], t: f64) -> Result<SpectralField> {
    Ok(star_prefactor(&pressure(u, t)?, t))
}

/// All nonlinear terms of `state`, sharing the physical-space velocity.
pub fn nonlinear_terms(state: &FlowState) -> Result<NonlinearTendencies> {
    let t = state.t;
    let grid = state.grid();
    let prim = state.primitive();
    let phys = [to_physical(&prim.u[0]), to_physical(&prim.u[1]), to_physical(&prim.u[2])];
    let theta_phys = to_physical(&prim.theta);
    let fields = [&prim.u[0], &prim.u[1], &prim.u[2], &prim.theta];
    let mut tr: Vec<SpectralField> =
        fields.par_iter().map(|f| transport_physical(&phys, f, t)).collect::<Result<_>>()?;
    let pressure = pressure_physical(&phys, grid, t)?;
    let flux_prod: Vec<C> = phys[1].iter().zip(&theta_phys).map(|(a, b)| a * b).collect();
    let theta_flux = to_spectral(flux_prod, grid)?.map_symbol(|w: WaveVector| {
        if w.k == 0 && w.l == 0 {
            C::new(0.0, w.eta)
        } else {
            C::new(0.0, 0.0)
        }
    });
    let t_theta = tr.pop().unwrap();
    let t_u3 = tr.pop().unwrap();
    let t_u2 = tr.pop().unwrap();
    let t_u1 = tr.pop().unwrap();
    Ok(NonlinearTendencies {
        t_star: star_prefactor(&t_u2, t).scale(-1.0),
        t_circ: circ_prefactor(&t_theta, t),
        p_star: star_prefactor(&pressure, t),
        t_u1,
        t_u2,
        t_u3,
        t_theta,
        pressure,
        theta_flux,
    })
}

use super::state::{FlowState, Physics};
use super::terms::{nonlinear_terms, NonlinearTendencies};
use crate::error::{Error, Result};
use crate::linear_dynamics::coupling_rhs;
use crate::spectral_core::{SpectralField, WaveVector};
use num_complex::Complex64;
use rayon::prelude::*;

type C = Complex64;

/// Everything except `nu Delta_L`: linear coupling plus, if enabled, the
/// nonlinear terms (returned for reuse).
pub(crate) fn explicit_tendency(
    state: &FlowState,
    physics: &Physics,
) -> Result<(FlowState, Option<NonlinearTendencies>)> {
    let grid = state.grid();
    let t = state.t;
    let lin = physics.linear();
    let nl = if physics.nonlinear { Some(nonlinear_terms(state)?) } else { None };
    let rows: Vec<[C; 5]> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let w = grid.wave_vector(i);
            let x = [state.u1.coeffs[i], state.u3.coeffs[i], state.g.coeffs[i], state.gamma.coeffs[i]];
            let r = coupling_rhs(w, x, t, &lin);
            let mut out = [r[0], r[1], r[2], r[3], C::new(0.0, 0.0)];
            if let Some(n) = &nl {
                let ii = C::new(0.0, 1.0);
                let p = n.pressure.coeffs[i];
                out[0] += n.t_u1.coeffs[i] + ii * (w.k as f64) * p;
                out[1] += n.t_u3.coeffs[i] + ii * (w.l as f64) * p;
                out[2] += n.t_star.coeffs[i] - ii * w.sheared_eta(t) * n.p_star.coeffs[i];
                out[3] += n.t_circ.coeffs[i];
                out[4] -= n.theta_flux.coeffs[i];
            }
            out
        })
        .collect();
    let mut d = FlowState::zeros(grid, t);
    for (i, r) in rows.into_iter().enumerate() {
        d.u1.coeffs[i] = r[0];
        d.u3.coeffs[i] = r[1];
        d.g.coeffs[i] = r[2];
        d.gamma.coeffs[i] = r[3];
        d.theta_bar0.coeffs[i] = r[4];
    }
    Ok((d, nl))
}

/// Full tendency of the evolved variables, viscosity included.
pub fn rhs_full(state: &FlowState, physics: &Physics) -> Result<FlowState> {
    let (mut d, _) = explicit_tendency(state, physics)?;
    let t = state.t;
    let visc = |w: WaveVector| C::new(-physics.nu * w.sheared_norm_sq(t), 0.0);
    for (out, x) in d.fields_mut().into_iter().zip(state.fields()) {
        out.axpy(1.0, &x.map_symbol(visc))?;
    }
    Ok(d)
}

/// Right-hand side of the passive-scalar law for `V_0 = (U^1 + Theta / beta)_0`:
/// `nu Delta V_0 + T(U, V)_0`, on the `k = 0` modes.
pub fn v0_tendency(state: &FlowState, physics: &Physics) -> Result<SpectralField> {
    if !(physics.beta > 0.0) {
        return Err(Error::Domain("V_0 needs beta > 0".into()));
    }
    let prim = state.primitive();
    let mut v = prim.u[0].clone();
    v.axpy(1.0 / physics.beta, &prim.theta)?;
    let mut out = v.map_symbol(|w: WaveVector| C::new(-physics.nu * w.norm_sq(), 0.0));
    if physics.nonlinear {
        let n = nonlinear_terms(state)?;
        out.axpy(1.0, &n.t_u1)?;
        out.axpy(1.0 / physics.beta, &n.t_theta)?;
    }
    Ok(out.map_symbol(|w: WaveVector| C::new(if w.k == 0 { 1.0 } else { 0.0 }, 0.0)))
}

/// `V_0` of a state.
pub(crate) fn v0_of(state: &FlowState, beta: f64) -> Result<SpectralField> {
    let prim = state.primitive();
    let mut v = prim.u[0].clone();
    v.axpy(1.0 / beta, &prim.theta)?;
    Ok(v.map_symbol(|w: WaveVector| C::new(if w.k == 0 { 1.0 } else { 0.0 }, 0.0)))
}

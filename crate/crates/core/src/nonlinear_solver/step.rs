use super::rhs::explicit_tendency;
use super::state::{FlowState, Physics};
use crate::error::{Error, Result};
use crate::linear_dynamics::sheared_norm_integral;
use crate::multipliers::{decay_density, Ghost, MultiplierParams};
use crate::spectral_core::{inverse_transform, Grid, SpectralField};
use rayon::prelude::*;

/// Largest admissible `dt * beta`.
pub const MAX_DT_BETA: f64 = 0.1;

/// Stepping context: physics, CFL limit and the time-stepped `log M_3`.
#[derive(Clone, Debug)]
pub struct Stepper {
    pub physics: Physics,
    /// Bound on `dt (|U^1| k_max + |U^2| s_max + |U^3| l_max)`.
    pub cfl_limit: f64,
    params: Option<MultiplierParams>,
    log_m3: Vec<f64>,
}

/// Per-mode integrating factors over `[t, t+h/2]` and `[t+h/2, t+h]`.
fn factors(grid: Grid, nu: f64, t: f64, h: f64) -> Vec<(f64, f64)> {
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let w = grid.wave_vector(i);
            let tm = t + 0.5 * h;
            ((-nu * sheared_norm_integral(w, t, tm)).exp(), (-nu * sheared_norm_integral(w, tm, t + h)).exp())
        })
        .collect()
}

fn combine(
    x: &FlowState,
    ex: &(dyn Fn(usize) -> f64 + Sync),
    k: &FlowState,
    ek: &(dyn Fn(usize) -> f64 + Sync),
    t: f64,
) -> FlowState {
    let mut out = FlowState::zeros(x.grid(), t);
    for ((o, a), b) in out.fields_mut().into_iter().zip(x.fields()).zip(k.fields()) {
        o.coeffs = a.coeffs.par_iter().zip(&b.coeffs).enumerate().map(|(i, (p, q))| p * ex(i) + q * ek(i)).collect();
    }
    out
}

fn max_abs_physical(f: &SpectralField) -> f64 {
    inverse_transform(f).iter().fold(0.0, |m, v| m.max(v.abs()))
}

impl Stepper {
    pub fn new(physics: Physics, grid: Grid) -> Result<Self> {
        let params = if physics.beta > 0.5 && physics.nu > 0.0 && physics.nu < 1.0 && physics.m >= 3 {
            Some(MultiplierParams::new(physics.nu, physics.beta, physics.m, 0.0)?)
        } else {
            None
        };
        Ok(Stepper { physics, cfl_limit: 1.0, params, log_m3: vec![0.0; grid.len()] })
    }

    /// Time-stepped `log M_3` per mode (empty weights when `beta <= 1/2`).
    pub fn log_m3(&self) -> Option<&[f64]> {
        self.params.as_ref().map(|_| self.log_m3.as_slice())
    }

    pub fn multiplier_params(&self) -> Option<MultiplierParams> {
        self.params
    }

    /// Advective CFL number of a step of size `dt` from `state`.
    pub fn cfl_number(&self, state: &FlowState, dt: f64) -> f64 {
        let grid = state.grid();
        let prim = state.primitive();
        let umax: Vec<f64> = prim.u.par_iter().map(max_abs_physical).collect();
        let t1 = state.t + dt;
        let (mut kmax, mut smax, mut lmax) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..grid.len() {
            if !grid.is_retained(i) {
                continue;
            }
            let w = grid.wave_vector(i);
            kmax = kmax.max((w.k as f64).abs());
            lmax = lmax.max((w.l as f64).abs());
            smax = smax.max(w.sheared_eta(t1).abs().max(w.sheared_eta(state.t).abs()));
        }
        dt * (umax[0] * kmax + umax[1] * smax + umax[2] * lmax)
    }

    /// One integrating-factor RK4 step; rejects steps that breach the CFL
    /// or `dt beta` limits.  Returns the new state and the constraint drift
    /// removed by the projection.
    pub fn step(&mut self, state: &FlowState, dt: f64) -> Result<(FlowState, f64)> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("dt = {dt} must be positive")));
        }
        if dt * self.physics.beta > MAX_DT_BETA * (1.0 + 1e-12) {
            return Err(Error::Cfl { t: state.t, dt, suggested: MAX_DT_BETA / self.physics.beta });
        }
        if self.physics.nonlinear {
            let c = self.cfl_number(state, dt);
            if c > self.cfl_limit {
                return Err(Error::Cfl { t: state.t, dt, suggested: 0.5 * dt * self.cfl_limit / c });
            }
        }
        let next = lawson_rk4(state, dt, &self.physics)?;
        if let Some(mp) = &self.params {
            let grid = state.grid();
            let (t, h) = (state.t, dt);
            self.log_m3.par_iter_mut().enumerate().for_each(|(i, lm)| {
                let w = grid.wave_vector(i);
                let d = |tau: f64| decay_density(Ghost::M3, w, &mp.at(tau));
                *lm -= h / 6.0 * (d(t) + 4.0 * d(t + 0.5 * h) + d(t + h));
            });
        }
        let mut next = next;
        let drift = next.project_constraint();
        if !next.is_finite() {
            return Err(Error::NonFinite(format!("state after step at t = {}", state.t)));
        }
        Ok((next, drift))
    }
}

fn lawson_rk4(x: &FlowState, h: f64, physics: &Physics) -> Result<FlowState> {
    let grid = x.grid();
    let t = x.t;
    let tm = t + 0.5 * h;
    let e = factors(grid, physics.nu, t, h);
    let e0 = |i: usize| e[i].0;
    let e1 = |i: usize| e[i].1;
    let ef = |i: usize| e[i].0 * e[i].1;
    let k1 = explicit_tendency(x, physics)?.0;
    let xa = combine(x, &e0, &k1, &|i| 0.5 * h * e0(i), tm);
    let k2 = explicit_tendency(&xa, physics)?.0;
    let xb = combine(x, &e0, &k2, &|_| 0.5 * h, tm);
    let k3 = explicit_tendency(&xb, physics)?.0;
    let xc = combine(x, &ef, &k3, &|i| h * e1(i), t + h);
    let k4 = explicit_tendency(&xc, physics)?.0;
    let mut out = combine(x, &ef, &k1, &|i| h / 6.0 * ef(i), t + h);
    let mid = combine(&k2, &|i| h / 3.0 * e1(i), &k3, &|i| h / 3.0 * e1(i), t + h);
    out.axpy(1.0, &mid)?;
    out.axpy(h / 6.0, &k4)?;
    Ok(out)
}

/// One step without CFL checks or auxiliary weights.
pub fn step_imex(state: &FlowState, dt: f64, physics: &Physics) -> Result<FlowState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("dt = {dt} must be positive")));
    }
    let mut next = lawson_rk4(state, dt, physics)?;
    next.project_constraint();
    Ok(next)
}

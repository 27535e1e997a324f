//! Ghost weights `M_1, M_2, M_3`, their product `M`, the main weight
//! `A = e^{lambda nu^{1/3} t} <k,eta,l>^{2m} M` and `lambda(beta)`.
//!
//! Each `M_j` solves `-M_j'/M_j = d_j(t)` with `M_j(0) = 1`, where
//!
//! * `d_1 = nu^{1/3} k^2 / (k^2 + nu^{2/3} s^2)`
//! * `d_2 = 2/(2 beta - 1) |k,l| k^2 / |k,s,l|^3`
//! * `d_3 = |k| |k,l|^{1/2} / |k,s,l|^{3/2}`
//!
//! with `s = eta - t k`.  All three are identically 1 on `k = 0`.

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::spectral_core::{Grid, WaveVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierParams {
    pub nu: f64,
    pub beta: f64,
    pub m: u32,
    pub t: f64,
}

impl MultiplierParams {
    pub fn new(nu: f64, beta: f64, m: u32, t: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::Domain(format!("nu = {nu} not in (0,1)")));
        }
        if !(beta > 0.5) || !beta.is_finite() {
            return Err(Error::Domain(format!("beta = {beta} must exceed 1/2")));
        }
        if m < 3 {
            return Err(Error::Domain(format!("m = {m} must be at least 3")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("t = {t} must be finite and non-negative")));
        }
        Ok(MultiplierParams { nu, beta, m, t })
    }

    pub fn at(&self, t: f64) -> Self {
        MultiplierParams { t, ..*self }
    }

    pub fn lambda(&self) -> f64 {
        (2.0 * self.beta - 1.0) / (2.0 * self.beta + 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ghost {
    M1,
    M2,
    M3,
}

impl Ghost {
    pub const ALL: [Ghost; 3] = [Ghost::M1, Ghost::M2, Ghost::M3];

    pub fn from_index(j: u8) -> Result<Self> {
        match j {
            1 => Ok(Ghost::M1),
            2 => Ok(Ghost::M2),
            3 => Ok(Ghost::M3),
            _ => Err(Error::Domain(format!("ghost weight index {j} not in 1..=3"))),
        }
    }
}

pub fn lambda_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.5) {
        return Err(Error::Domain(format!("lambda(beta) needs beta > 1/2, got {beta}")));
    }
    if beta.is_infinite() {
        return Ok(1.0);
    }
    Ok((2.0 * beta - 1.0) / (2.0 * beta + 1.0))
}

/// `-M_j'/M_j` at the time stored in `p`.
pub fn decay_density(j: Ghost, w: WaveVector, p: &MultiplierParams) -> f64 {
    density_at(j, w, p, p.t)
}

fn density_at(j: Ghost, w: WaveVector, p: &MultiplierParams, tau: f64) -> f64 {
    if w.k == 0 {
        return 0.0;
    }
    let k = w.k as f64;
    let s = w.sheared_eta(tau);
    match j {
        Ghost::M1 => {
            let c = p.nu.cbrt();
            c * k * k / (k * k + c * c * s * s)
        }
        Ghost::M2 => {
            let q = w.sheared_norm_sq(tau).sqrt();
            2.0 / (2.0 * p.beta - 1.0) * w.xz_norm() * k * k / (q * q * q)
        }
        Ghost::M3 => {
            let q = w.sheared_norm_sq(tau).sqrt();
            k.abs() * w.xz_norm().sqrt() / q.powf(1.5)
        }
    }
}

fn m3_integrand(x: f64) -> f64 {
    1.0 / x.cosh().sqrt()
}

/// `log M_j(t)` via closed forms (`M_1`, `M_2`) or quadrature (`M_3`).
pub fn log_weight(j: Ghost, w: WaveVector, p: &MultiplierParams) -> Result<f64> {
    if w.k == 0 || p.t == 0.0 {
        return Ok(0.0);
    }
    let k = w.k as f64;
    let (s0, s1) = (w.eta, w.sheared_eta(p.t));
    let qxz = w.xz_norm();
    match j {
        Ghost::M1 => {
            let c = p.nu.cbrt() / k.abs();
            Ok(-k.signum() * ((c * s0).atan() - (c * s1).atan()))
        }
        Ghost::M2 => {
            let q2 = qxz * qxz;
            let prim = |s: f64| s / (q2 * (q2 + s * s).sqrt());
            Ok(-2.0 / (2.0 * p.beta - 1.0) * qxz * k * (prim(s0) - prim(s1)))
        }
        Ghost::M3 => {
            // s = |k,l| sinh(x) turns |k,l|^{1/2} (|k,l|^2 + s^2)^{-3/4} ds into cosh(x)^{-1/2} dx
            let (x0, x1) = ((s0 / qxz).asinh(), (s1 / qxz).asinh());
            let est = integrate(m3_integrand, x1, x0, Tolerance::relative(1e-12)).map_err(|_| Error::Quadrature {
                a: x1,
                b: x0,
                context: format!("log M3 at mode (k={}, eta={}, l={}), t={}", w.k, w.eta, w.l, p.t),
            })?;
            Ok(-k.signum() * est.value)
        }
    }
}

/// `log M_j(t)` by direct quadrature of the density in time (oracle route).
pub fn log_weight_quadrature(j: Ghost, w: WaveVector, p: &MultiplierParams) -> Result<f64> {
    if w.k == 0 || p.t == 0.0 {
        return Ok(0.0);
    }
    // split at the Orr time so the peak sits on an interval endpoint
    let orr = w.eta / w.k as f64;
    let mut cuts = vec![0.0];
    if orr > 0.0 && orr < p.t {
        cuts.push(orr);
    }
    cuts.push(p.t);
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let est = integrate(|tau| density_at(j, w, p, tau), pair[0], pair[1], Tolerance::relative(1e-12))?;
        total += est.value;
    }
    Ok(-total)
}

pub fn weight(j: Ghost, w: WaveVector, p: &MultiplierParams) -> Result<f64> {
    Ok(log_weight(j, w, p)?.exp())
}

/// Lower bound on `M_3` stated for the ghost weight, `exp(-(sqrt(pi)/2) G(1/4)/G(3/4))`.
pub fn kappa_floor_m3() -> f64 {
    (-0.5 * PI.sqrt() * gamma(0.25) / gamma(0.75)).exp()
}

/// Infimum of `M_3` over all modes and times, `exp(-sqrt(pi) G(1/4)/G(3/4))`.
///
/// Attained as `t -> inf` along `eta k -> +inf`, where `s = eta - tk` sweeps
/// the whole line instead of a half line.
pub fn m3_infimum() -> f64 {
    (-PI.sqrt() * gamma(0.25) / gamma(0.75)).exp()
}

pub fn log_main_weight(w: WaveVector, p: &MultiplierParams) -> Result<f64> {
    let mut log_a = lambda_beta(p.beta)? * p.nu.cbrt() * p.t + p.m as f64 * (1.0 + w.norm_sq()).ln();
    for j in Ghost::ALL {
        log_a += log_weight(j, w, p)?;
    }
    Ok(log_a)
}

pub fn main_weight_a(w: WaveVector, p: &MultiplierParams) -> Result<f64> {
    let a = log_main_weight(w, p)?.exp();
    if !a.is_finite() {
        return Err(Error::Range(format!("A overflows at t = {} for mode ({}, {}, {})", p.t, w.k, w.eta, w.l)));
    }
    Ok(a)
}

/// `2 sqrt(d_1) + nu^{1/2} |s| / (2|k|) - nu^{1/6}`.
pub fn check_orr_inequality(w: WaveVector, p: &MultiplierParams) -> Result<f64> {
    if w.k == 0 {
        return Err(Error::WrongSector("Orr inequality needs k != 0".into()));
    }
    let d1 = decay_density(Ghost::M1, w, p);
    let rhs = 2.0 * d1.sqrt() + 0.5 * p.nu.sqrt() * w.sheared_eta(p.t).abs() / (w.k as f64).abs();
    Ok(rhs - p.nu.powf(1.0 / 6.0))
}

/// Per-mode weights and decay densities on a grid at one time.
#[derive(Clone, Debug)]
pub struct WeightTable {
    pub grid: Grid,
    pub params: MultiplierParams,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
    pub m3: Vec<f64>,
    pub m: Vec<f64>,
    pub a: Vec<f64>,
    pub density: [Vec<f64>; 3],
}

impl WeightTable {
    pub fn build(grid: Grid, params: MultiplierParams) -> Result<Self> {
        let growth = lambda_beta(params.beta)? * params.nu.cbrt() * params.t;
        let rows: Vec<[f64; 7]> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let w = grid.wave_vector(i);
                let l1 = log_weight(Ghost::M1, w, &params)?;
                let l2 = log_weight(Ghost::M2, w, &params)?;
                let l3 = log_weight(Ghost::M3, w, &params)?;
                let log_a = growth + params.m as f64 * (1.0 + w.norm_sq()).ln() + l1 + l2 + l3;
                Ok([
                    l1.exp(),
                    l2.exp(),
                    l3.exp(),
                    log_a.exp(),
                    decay_density(Ghost::M1, w, &params),
                    decay_density(Ghost::M2, w, &params),
                    decay_density(Ghost::M3, w, &params),
                ])
            })
            .collect::<Result<_>>()?;
        let col = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<f64>>();
        let (m1, m2, m3) = (col(0), col(1), col(2));
        let m = m1.iter().zip(&m2).zip(&m3).map(|((a, b), c)| a * b * c).collect();
        Ok(WeightTable { grid, params, m1, m2, m3, m, a: col(3), density: [col(4), col(5), col(6)] })
    }
}

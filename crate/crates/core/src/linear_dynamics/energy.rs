use super::system::{linear_rhs, LinearPhysics};
use crate::error::{Error, Result};
use crate::multipliers::{lambda_beta, MultiplierParams, WeightTable};
use crate::spectral_core::SpectralField;
use num_complex::Complex64;

/// `E = 1/2 (|A G|^2 + |A Gamma|^2) + cross_term` with its coercivity band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport {
    pub e: f64,
    pub norm_g: f64,
    pub norm_gamma: f64,
    pub cross_term: f64,
    pub coercivity_lower: f64,
    pub coercivity_upper: f64,
    pub violation: bool,
}

fn check_nonzero_sector(f: &SpectralField) -> Result<()> {
    let tol = 1e-13 * f.norm_l2();
    for (i, c) in f.coeffs.iter().enumerate() {
        if f.grid.wave_vector(i).k == 0 && c.norm() > tol {
            return Err(Error::WrongSector("energy functional takes nonzero-mode fields".into()));
        }
    }
    Ok(())
}

/// Symbol `k s / (|k,l| q)` of the cross-term operator, bounded by 1.
fn cross_symbol(w: crate::spectral_core::WaveVector, t: f64) -> f64 {
    if w.k == 0 {
        return 0.0;
    }
    w.k as f64 * w.sheared_eta(t) / (w.xz_norm() * w.sheared_norm_sq(t).sqrt())
}

/// Energy functional from a prebuilt weight table (its time and parameters are used).
pub fn energy_from_table(table: &WeightTable, g: &SpectralField, gamma: &SpectralField) -> Result<EnergyReport> {
    g.check_grid(gamma)?;
    if g.grid != table.grid {
        return Err(Error::GridMismatch);
    }
    check_nonzero_sector(g)?;
    check_nonzero_sector(gamma)?;
    let p = &table.params;
    lambda_beta(p.beta)?;
    let (mut ng, mut ngam, mut cross) = (0.0, 0.0, 0.0);
    for i in 0..g.grid.len() {
        let a2 = table.a[i] * table.a[i];
        let (x, y) = (g.coeffs[i], gamma.coeffs[i]);
        ng += a2 * x.norm_sqr();
        ngam += a2 * y.norm_sqr();
        cross += a2 * cross_symbol(g.grid.wave_vector(i), p.t) * (x * y.conj()).re;
    }
    let cross_term = 0.5 * cross / p.beta;
    let e = 0.5 * (ng + ngam) + cross_term;
    let lower = 0.5 * (1.0 - 0.5 / p.beta) * (ng + ngam);
    let upper = 0.5 * (1.0 + 0.5 / p.beta) * (ng + ngam);
    let slack = 1e-10 * (ng + ngam);
    Ok(EnergyReport {
        e,
        norm_g: ng.sqrt(),
        norm_gamma: ngam.sqrt(),
        cross_term,
        coercivity_lower: lower,
        coercivity_upper: upper,
        violation: e < lower - slack || e > upper + slack,
    })
}

pub fn energy_functional(g: &SpectralField, gamma: &SpectralField, params: &MultiplierParams) -> Result<EnergyReport> {
    lambda_beta(params.beta)?;
    let table = WeightTable::build(g.grid, *params)?;
    energy_from_table(&table, g, gamma)
}

/// Exact `dE/dt` along the linear flow of `(G, Gamma)` generated by `physics`.
pub fn energy_rate(
    g: &SpectralField,
    gamma: &SpectralField,
    params: &MultiplierParams,
    physics: &LinearPhysics,
) -> Result<f64> {
    g.check_grid(gamma)?;
    let t = params.t;
    let table = WeightTable::build(g.grid, *params)?;
    let lam = lambda_beta(params.beta)? * params.nu.cbrt();
    let mut rate = 0.0;
    let zero = Complex64::new(0.0, 0.0);
    for i in 0..g.grid.len() {
        let w = g.grid.wave_vector(i);
        if w.k == 0 {
            continue;
        }
        let (x, y) = (g.coeffs[i], gamma.coeffs[i]);
        let a2 = table.a[i] * table.a[i];
        let da2 = 2.0 * a2 * (lam - table.density[0][i] - table.density[1][i] - table.density[2][i]);
        let r = linear_rhs(w, [zero, zero, x, y], t, physics);
        let (k, s) = (w.k as f64, w.sheared_eta(t));
        let (qxz, q2) = (w.xz_norm(), w.sheared_norm_sq(t));
        let q = q2.sqrt();
        let c = k * s / (qxz * q);
        // ds/dt = -k, dq/dt = -k s / q
        let dc = (-k * k / (qxz * q)) + k * s * k * s / (qxz * q * q2);
        let quad = x.norm_sqr() + y.norm_sqr();
        let dquad = 2.0 * ((r[2] * x.conj()).re + (r[3] * y.conj()).re);
        let mix = (x * y.conj()).re;
        let dmix = (r[2] * y.conj() + x * r[3].conj()).re;
        rate += 0.5 * (da2 * quad + a2 * dquad) + 0.5 / params.beta * (da2 * c * mix + a2 * (dc * mix + c * dmix));
    }
    Ok(rate)
}

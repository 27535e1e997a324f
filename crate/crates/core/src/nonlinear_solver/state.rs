use crate::error::{Error, Result};
use crate::linear_dynamics::LinearPhysics;
use crate::spectral_core::{Grid, ModeClass, SpectralField, WaveVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

/// Parameters of the full system.  `nonlinear = false` leaves the linearised
/// equations; `lift_up = false` removes the `-U^2` forcing of `U^1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Physics {
    pub nu: f64,
    pub beta: f64,
    pub m: u32,
    pub lift_up: bool,
    pub nonlinear: bool,
}

impl Physics {
    pub fn new(nu: f64, beta: f64, m: u32) -> Result<Self> {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::Domain(format!("nu = {nu} must be finite and non-negative")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("beta = {beta} must be finite and non-negative")));
        }
        Ok(Physics { nu, beta, m, lift_up: true, nonlinear: true })
    }

    pub fn linear(&self) -> LinearPhysics {
        LinearPhysics { nu: self.nu, beta: self.beta, lift_up: self.lift_up, orr_terms: true }
    }
}

/// Evolved variables.  `theta_bar0` lives on the double-zero modes `k = l = 0`;
/// `G` and `Gamma` vanish there.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub u1: SpectralField,
    pub u3: SpectralField,
    pub g: SpectralField,
    pub gamma: SpectralField,
    pub theta_bar0: SpectralField,
    pub t: f64,
}

/// `(U^1, U^2, U^3, Theta)` in the moving frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Primitive {
    pub u: [SpectralField; 3],
    pub theta: SpectralField,
}

impl FlowState {
    pub fn zeros(grid: Grid, t: f64) -> Self {
        let z = SpectralField::zeros(grid);
        FlowState { u1: z.clone(), u3: z.clone(), g: z.clone(), gamma: z.clone(), theta_bar0: z, t }
    }

    pub fn grid(&self) -> Grid {
        self.u1.grid
    }

    pub fn fields(&self) -> [&SpectralField; 5] {
        [&self.u1, &self.u3, &self.g, &self.gamma, &self.theta_bar0]
    }

    pub fn fields_mut(&mut self) -> [&mut SpectralField; 5] {
        [&mut self.u1, &mut self.u3, &mut self.g, &mut self.gamma, &mut self.theta_bar0]
    }

    pub fn check(&self) -> Result<()> {
        for f in self.fields() {
            self.u1.check_grid(f)?;
        }
        let g = self.grid();
        for i in 0..g.len() {
            let w = g.wave_vector(i);
            if w.class() == ModeClass::DoubleZero {
                if self.g.coeffs[i] != C::new(0.0, 0.0) || self.gamma.coeffs[i] != C::new(0.0, 0.0) {
                    return Err(Error::WrongSector("G and Gamma must vanish on k = l = 0".into()));
                }
            } else if self.theta_bar0.coeffs[i] != C::new(0.0, 0.0) {
                return Err(Error::WrongSector("theta_bar0 lives on k = l = 0 only".into()));
            }
        }
        Ok(())
    }

    /// Builds the state from primitive fields at time `t`; the x-z mean of
    /// `U^2` is discarded and that of `Theta` goes to `theta_bar0`.
    pub fn from_primitive(p: &Primitive, t: f64) -> Result<Self> {
        let grid = p.theta.grid;
        for f in p.u.iter() {
            grid_eq(grid, f.grid)?;
        }
        let mut s = FlowState::zeros(grid, t);
        s.u1 = p.u[0].clone();
        s.u3 = p.u[2].clone();
        for i in 0..grid.len() {
            let w = grid.wave_vector(i);
            let qxz = w.xz_norm();
            if qxz == 0.0 {
                s.theta_bar0.coeffs[i] = p.theta.coeffs[i];
                continue;
            }
            let q = w.sheared_norm_sq(t).sqrt();
            s.g.coeffs[i] = -p.u[1].coeffs[i] * (q.powf(1.5) / qxz.sqrt());
            s.gamma.coeffs[i] = p.theta.coeffs[i] * (qxz * q).sqrt();
        }
        Ok(s)
    }

    pub fn primitive(&self) -> Primitive {
        let (u2, theta) = recover_primitive(&self.g, &self.gamma, &self.theta_bar0, self.t);
        Primitive { u: [self.u1.clone(), u2, self.u3.clone()], theta }
    }

    /// `max |k U^1 + (eta - tk) U^2 + l U^3|` over modes.
    pub fn divergence(&self) -> f64 {
        let g = self.grid();
        let mut worst: f64 = 0.0;
        for i in 0..g.len() {
            let w = g.wave_vector(i);
            let u2 = u2_of(w, self.g.coeffs[i], self.t);
            let d = self.u1.coeffs[i] * w.k as f64 + u2 * w.sheared_eta(self.t) + self.u3.coeffs[i] * w.l as f64;
            worst = worst.max(d.norm());
        }
        worst
    }

    /// Restores `k U^1 + l U^3 = -(eta - tk) U^2` by moving `(U^1, U^3)`
    /// orthogonally; returns the largest correction applied.
    pub fn project_constraint(&mut self) -> f64 {
        let g = self.grid();
        let mut worst: f64 = 0.0;
        for i in 0..g.len() {
            let w = g.wave_vector(i);
            let (k, l) = (w.k as f64, w.l as f64);
            let kl2 = k * k + l * l;
            if kl2 == 0.0 {
                continue;
            }
            let u2 = u2_of(w, self.g.coeffs[i], self.t);
            let r = self.u1.coeffs[i] * k + u2 * w.sheared_eta(self.t) + self.u3.coeffs[i] * l;
            self.u1.coeffs[i] -= r * (k / kl2);
            self.u3.coeffs[i] -= r * (l / kl2);
            worst = worst.max(r.norm());
        }
        worst
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.fields().iter().map(|f| f.hermitian_defect()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.fields().iter().all(|f| f.is_finite())
    }

    pub fn axpy(&mut self, a: f64, other: &FlowState) -> Result<()> {
        for (x, y) in self.fields_mut().into_iter().zip(other.fields()) {
            x.axpy(a, y)?;
        }
        Ok(())
    }
}

fn grid_eq(a: Grid, b: Grid) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

#[inline]
fn u2_of(w: WaveVector, g: C, t: f64) -> C {
    let qxz = w.xz_norm();
    if qxz == 0.0 {
        return C::new(0.0, 0.0);
    }
    -g * (qxz.sqrt() / w.sheared_norm_sq(t).powf(0.75))
}

/// `U^2 = -|grad_xz|^{1/2} |grad_L|^{-3/2} G`, `Theta = |grad_xz|^{-1/2} |grad_L|^{-1/2} Gamma + Theta-bar_0`.
pub fn recover_primitive(
    g: &SpectralField,
    gamma: &SpectralField,
    theta_bar0: &SpectralField,
    t: f64,
) -> (SpectralField, SpectralField) {
    let grid = g.grid;
    let mut u2 = SpectralField::zeros(grid);
    let mut theta = theta_bar0.clone();
    for i in 0..grid.len() {
        let w = grid.wave_vector(i);
        let qxz = w.xz_norm();
        if qxz == 0.0 {
            continue;
        }
        let q = w.sheared_norm_sq(t).sqrt();
        u2.coeffs[i] = -g.coeffs[i] * (qxz.sqrt() / q.powf(1.5));
        theta.coeffs[i] = gamma.coeffs[i] / (qxz * q).sqrt();
    }
    (u2, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_symmetric_variables() {
        let grid = Grid::new(4, 4, 4, 2.0 * PI).unwrap();
        let mut tb = SpectralField::zeros(grid);
        tb.set_hermitian(0, 1, 0, C::new(0.5, 0.2)).unwrap();
        let z = SpectralField::zeros(grid);
        let (u2, th) = recover_primitive(&z, &z, &tb, 3.0);
        assert_eq!(u2.max_abs(), 0.0);
        assert_eq!(th, tb);
    }

    #[test]
    fn roundtrip_and_decay() {
        let grid = Grid::new(4, 8, 4, 2.0 * PI).unwrap();
        let mut s = FlowState::zeros(grid, 0.0);
        s.g.set_hermitian(1, 2, 1, C::new(1.0, -0.5)).unwrap();
        s.gamma.set_hermitian(-1, 1, 0, C::new(0.3, 0.1)).unwrap();
        for t in [0.0, 1.7, 9.0] {
            s.t = t;
            let back = FlowState::from_primitive(&s.primitive(), t).unwrap();
            assert!(back.g.sub(&s.g).unwrap().max_abs() < 1e-12);
            assert!(back.gamma.sub(&s.gamma).unwrap().max_abs() < 1e-12);
        }
        // |U^2| / |G| = |k,l|^{1/2} / |k, eta - tk, l|^{3/2}
        let w = WaveVector::new(1, 2.0, 1);
        let t = 40.0;
        s.t = t;
        let u2 = s.primitive().u[1].get(1, 2, 1).unwrap().norm();
        let expect = s.g.get(1, 2, 1).unwrap().norm() * 2f64.sqrt().sqrt() / w.sheared_norm_sq(t).powf(0.75);
        assert!((u2 - expect).abs() < 1e-15);
    }

    #[test]
    fn projection_restores_constraint() {
        let grid = Grid::new(4, 8, 4, 2.0 * PI).unwrap();
        let mut s = FlowState::zeros(grid, 2.0);
        s.g.set_hermitian(1, 2, 1, C::new(1.0, -0.5)).unwrap();
        s.u1.set_hermitian(1, 2, 1, C::new(0.2, 0.0)).unwrap();
        assert!(s.divergence() > 0.1);
        s.project_constraint();
        assert!(s.divergence() < 1e-15);
        assert!(s.hermitian_defect() < 1e-15);
    }
}

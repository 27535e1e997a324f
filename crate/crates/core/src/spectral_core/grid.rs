use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub ly: f64,
    pub dealias_fraction: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, nz: usize, ly: f64) -> Result<Self> {
        Self::with_dealias(nx, ny, nz, ly, 2.0 / 3.0)
    }

    pub fn with_dealias(nx: usize, ny: usize, nz: usize, ly: f64, dealias_fraction: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny), ("nz", nz)] {
            if n == 0 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!("{name} = {n} must be a positive even integer")));
            }
        }
        if !(ly.is_finite() && ly > 0.0) {
            return Err(Error::InvalidGrid(format!("ly = {ly} must be positive")));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!("dealias_fraction = {dealias_fraction} not in (0,1]")));
        }
        Ok(Grid { nx, ny, nz, ly, dealias_fraction })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.ny + iy) * self.nz + iz
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let iz = idx % self.nz;
        let rest = idx / self.nz;
        (rest / self.ny, rest % self.ny, iz)
    }

    #[inline]
    pub fn signed(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Array index of the signed wavenumber `m` on an axis of length `n`.
    #[inline]
    pub fn slot(m: i64, n: usize) -> Option<usize> {
        let half = (n / 2) as i64;
        if m < -half || m >= half {
            None
        } else {
            Some(m.rem_euclid(n as i64) as usize)
        }
    }

    pub fn eta_unit(&self) -> f64 {
        2.0 * PI / self.ly
    }

    #[inline]
    pub fn k_of(&self, ix: usize) -> i64 {
        Self::signed(ix, self.nx)
    }

    #[inline]
    pub fn n_of(&self, iy: usize) -> i64 {
        Self::signed(iy, self.ny)
    }

    #[inline]
    pub fn l_of(&self, iz: usize) -> i64 {
        Self::signed(iz, self.nz)
    }

    #[inline]
    pub fn wave_vector(&self, idx: usize) -> WaveVector {
        let (ix, iy, iz) = self.unravel(idx);
        WaveVector { k: self.k_of(ix), eta: self.n_of(iy) as f64 * self.eta_unit(), l: self.l_of(iz) }
    }

    /// Index of the Hermitian partner `(-k,-eta,-l)`.
    #[inline]
    pub fn partner(&self, idx: usize) -> usize {
        let (ix, iy, iz) = self.unravel(idx);
        self.index((self.nx - ix) % self.nx, (self.ny - iy) % self.ny, (self.nz - iz) % self.nz)
    }

    /// True if any axis sits on its Nyquist wavenumber `-N/2`.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let (ix, iy, iz) = self.unravel(idx);
        ix == self.nx / 2 || iy == self.ny / 2 || iz == self.nz / 2
    }

    /// 2/3-rule membership: |m| < fraction * N/2 on every axis.
    #[inline]
    pub fn is_retained(&self, idx: usize) -> bool {
        let (ix, iy, iz) = self.unravel(idx);
        let f = self.dealias_fraction;
        let keep = |m: i64, n: usize| (m.abs() as f64) < f * (n / 2) as f64;
        keep(self.k_of(ix), self.nx) && keep(self.n_of(iy), self.ny) && keep(self.l_of(iz), self.nz)
    }

    pub fn x_coords(&self) -> Vec<f64> {
        (0..self.nx).map(|i| 2.0 * PI * i as f64 / self.nx as f64).collect()
    }

    pub fn y_coords(&self) -> Vec<f64> {
        (0..self.ny).map(|i| -0.5 * self.ly + self.ly * i as f64 / self.ny as f64).collect()
    }

    pub fn z_coords(&self) -> Vec<f64> {
        (0..self.nz).map(|i| 2.0 * PI * i as f64 / self.nz as f64).collect()
    }

    /// Physical array of `f(x, y, z)` sampled on the collocation grid.
    pub fn sample<F: Fn(f64, f64, f64) -> f64>(&self, f: F) -> Vec<f64> {
        let (xs, ys, zs) = (self.x_coords(), self.y_coords(), self.z_coords());
        let mut out = Vec::with_capacity(self.len());
        for &x in &xs {
            for &y in &ys {
                for &z in &zs {
                    out.push(f(x, y, z));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveVector {
    pub k: i64,
    pub eta: f64,
    pub l: i64,
}

impl WaveVector {
    pub fn new(k: i64, eta: f64, l: i64) -> Self {
        WaveVector { k, eta, l }
    }

    /// Effective y-frequency `eta - t k` in the sheared frame.
    #[inline]
    pub fn sheared_eta(&self, t: f64) -> f64 {
        self.eta - t * self.k as f64
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        let (k, l) = (self.k as f64, self.l as f64);
        k * k + self.eta * self.eta + l * l
    }

    /// `|k, eta - tk, l|^2`.
    #[inline]
    pub fn sheared_norm_sq(&self, t: f64) -> f64 {
        let (k, l) = (self.k as f64, self.l as f64);
        let s = self.sheared_eta(t);
        k * k + s * s + l * l
    }

    #[inline]
    pub fn xz_norm(&self) -> f64 {
        ((self.k * self.k + self.l * self.l) as f64).sqrt()
    }

    #[inline]
    pub fn bracket(&self) -> f64 {
        (1.0 + self.norm_sq()).sqrt()
    }

    pub fn class(&self) -> ModeClass {
        if self.k != 0 {
            ModeClass::NonZero
        } else if self.l != 0 {
            ModeClass::SimpleZero
        } else {
            ModeClass::DoubleZero
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeClass {
    NonZero,
    SimpleZero,
    DoubleZero,
}

impl ModeClass {
    pub const ALL: [ModeClass; 3] = [ModeClass::NonZero, ModeClass::SimpleZero, ModeClass::DoubleZero];

    /// The `k = 0` sector (simple and double zero modes together).
    pub fn is_zero_mode(self) -> bool {
        self != ModeClass::NonZero
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_sizes() {
        assert!(Grid::new(7, 8, 8, 1.0).is_err());
        assert!(Grid::new(8, 8, 8, -1.0).is_err());
        assert!(Grid::with_dealias(8, 8, 8, 1.0, 0.0).is_err());
    }

    #[test]
    fn index_roundtrip_and_partner() {
        let g = Grid::new(4, 6, 8, 2.0).unwrap();
        for idx in 0..g.len() {
            let (a, b, c) = g.unravel(idx);
            assert_eq!(g.index(a, b, c), idx);
            let p = g.partner(idx);
            assert_eq!(g.partner(p), idx);
            let (w, wp) = (g.wave_vector(idx), g.wave_vector(p));
            if !g.is_nyquist(idx) {
                assert_eq!(w.k, -wp.k);
                assert_eq!(w.l, -wp.l);
                assert!((w.eta + wp.eta).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eta_spacing() {
        let g = Grid::new(4, 8, 4, 4.0 * PI).unwrap();
        assert!((g.eta_unit() - 0.5).abs() < 1e-15);
        assert_eq!(g.n_of(4), -4);
        assert_eq!(Grid::slot(-4, 8), Some(4));
        assert_eq!(Grid::slot(4, 8), None);
    }

    #[test]
    fn two_thirds_rule() {
        let g = Grid::new(12, 12, 12, 1.0).unwrap();
        assert!(g.is_retained(g.index(3, 0, 0)));
        assert!(!g.is_retained(g.index(4, 0, 0)));
        assert!(!g.is_retained(g.index(8, 0, 0)));
    }

    #[test]
    fn classes() {
        assert_eq!(WaveVector::new(1, 0.0, 0).class(), ModeClass::NonZero);
        assert_eq!(WaveVector::new(0, 3.0, -2).class(), ModeClass::SimpleZero);
        assert_eq!(WaveVector::new(0, 3.0, 0).class(), ModeClass::DoubleZero);
        assert!((WaveVector::new(1, 0.0, 1).bracket() - 3f64.sqrt()).abs() < 1e-15);
    }
}

use super::grid::{Grid, WaveVector};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    pub grid: Grid,
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        SpectralField { grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Dimension { expected: grid.len(), got: coeffs.len() });
        }
        Ok(SpectralField { grid, coeffs })
    }

    /// Builds a field by evaluating `f` on every wave vector.
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(WaveVector) -> Complex64 + Sync,
    {
        let coeffs = (0..grid.len()).into_par_iter().map(|i| f(grid.wave_vector(i))).collect();
        SpectralField { grid, coeffs }
    }

    /// Multiplies every coefficient by `m(wave_vector)`.
    pub fn map_symbol<F>(&self, m: F) -> Self
    where
        F: Fn(WaveVector) -> Complex64 + Sync,
    {
        let g = self.grid;
        let coeffs = self.coeffs.par_iter().enumerate().map(|(i, c)| c * m(g.wave_vector(i))).collect();
        SpectralField { grid: g, coeffs }
    }

    pub fn get(&self, k: i64, n: i64, l: i64) -> Option<Complex64> {
        let g = &self.grid;
        let ix = Grid::slot(k, g.nx)?;
        let iy = Grid::slot(n, g.ny)?;
        let iz = Grid::slot(l, g.nz)?;
        Some(self.coeffs[g.index(ix, iy, iz)])
    }

    /// Sets the coefficient at `(k, n, l)` and its Hermitian partner.
    pub fn set_hermitian(&mut self, k: i64, n: i64, l: i64, c: Complex64) -> Result<()> {
        let g = self.grid;
        let pos = |m: i64, len: usize| {
            Grid::slot(m, len).ok_or_else(|| Error::Range(format!("wavenumber {m} outside axis of {len}")))
        };
        let idx = g.index(pos(k, g.nx)?, pos(n, g.ny)?, pos(l, g.nz)?);
        let p = g.partner(idx);
        if p == idx {
            self.coeffs[idx] = Complex64::new(c.re, 0.0);
        } else {
            self.coeffs[idx] = c;
            self.coeffs[p] = c.conj();
        }
        Ok(())
    }

    pub fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            Err(Error::GridMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.check_grid(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(SpectralField { grid: self.grid, coeffs })
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.check_grid(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(SpectralField { grid: self.grid, coeffs })
    }

    pub fn scale(&self, a: f64) -> Self {
        SpectralField { grid: self.grid, coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    pub fn scale_complex(&self, a: Complex64) -> Self {
        SpectralField { grid: self.grid, coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) -> Result<()> {
        self.check_grid(other)?;
        for (s, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *s += o * a;
        }
        Ok(())
    }

    /// L^2 norm on the unit-measure box (Parseval).
    pub fn norm_l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Real L^2 inner product `Re sum f conj(g)`.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a * b.conj()).re).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest `|c(-w) - conj c(w)|`, zero for the transform of a real field.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| (self.coeffs[self.grid.partner(i)] - self.coeffs[i].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Fourier coefficients of the physical real part, `(c(w) + conj c(-w)) / 2`.
    pub fn real_part(&self) -> Self {
        let g = self.grid;
        let coeffs = (0..g.len()).map(|i| 0.5 * (self.coeffs[i] + self.coeffs[g.partner(i)].conj())).collect();
        SpectralField { grid: g, coeffs }
    }

    /// Zeroes every mode on a Nyquist plane.
    pub fn clear_nyquist(&mut self) {
        let g = self.grid;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if g.is_nyquist(i) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
}

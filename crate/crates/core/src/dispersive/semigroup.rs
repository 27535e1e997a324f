use crate::error::{Error, Result};
use crate::spectral_core::{SpectralField, WaveVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersiveOperator {
    pub nu: f64,
    pub beta: f64,
}

impl DispersiveOperator {
    pub fn new(nu: f64, beta: f64) -> Result<Self> {
        if !(nu >= 0.0 && nu.is_finite()) || !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("nu = {nu}, beta = {beta} must be finite and non-negative")));
        }
        Ok(DispersiveOperator { nu, beta })
    }

    /// `|l| / |eta, l|`, zero on `l = 0`.
    pub fn dispersion(eta: f64, l: i64) -> f64 {
        if l == 0 {
            0.0
        } else {
            (l as f64).abs() / (eta * eta + (l * l) as f64).sqrt()
        }
    }

    /// Symbol of `e^{tL}` at `(eta, l)`.
    pub fn symbol(&self, eta: f64, l: i64, t: f64) -> C {
        let q2 = eta * eta + (l * l) as f64;
        C::from_polar((-self.nu * q2 * t).exp(), -self.beta * t * Self::dispersion(eta, l))
    }

    pub(crate) fn apply_unchecked(&self, f: &SpectralField, t: f64) -> SpectralField {
        f.map_symbol(|w: WaveVector| if w.k == 0 { self.symbol(w.eta, w.l, t) } else { C::new(0.0, 0.0) })
    }
}

/// Keeps `k = 0, l != 0`, the sector on which `R` is invertible.
pub fn project_simple_zero(f: &SpectralField) -> SpectralField {
    f.map_symbol(|w: WaveVector| C::new(if w.k == 0 && w.l != 0 { 1.0 } else { 0.0 }, 0.0))
}

/// `e^{tL} f` for a complex `(y,z)` field stored on the `k = 0` plane.
pub fn semigroup_apply(f: &SpectralField, t: f64, op: &DispersiveOperator) -> Result<SpectralField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t = {t} must be finite and non-negative")));
    }
    let g = f.grid;
    let tol = 1e-13 * f.max_abs().max(1.0);
    for (i, c) in f.coeffs.iter().enumerate() {
        if c.norm() <= tol {
            continue;
        }
        let w = g.wave_vector(i);
        if w.k != 0 {
            return Err(Error::WrongSector(format!("semigroup acts on x-independent fields, found {w:?}")));
        }
        if w.l == 0 {
            return Err(Error::Kernel(format!("field has nonzero z-mean at eta = {}", w.eta)));
        }
    }
    Ok(op.apply_unchecked(f, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::Grid;

    fn single(n: i64, l: i64) -> SpectralField {
        let g = Grid::new(2, 16, 8, 6.0).unwrap();
        let mut f = SpectralField::zeros(g);
        let idx = g.index(0, Grid::slot(n, 16).unwrap(), Grid::slot(l, 8).unwrap());
        f.coeffs[idx] = C::new(0.5, -1.0);
        f
    }

    #[test]
    fn identity_and_phase() {
        let op = DispersiveOperator::new(0.0, 1.3).unwrap();
        let f = single(0, 1);
        assert_eq!(semigroup_apply(&f, 0.0, &op).unwrap(), f);
        let t = 2.2;
        let g = semigroup_apply(&f, t, &op).unwrap();
        let c0 = f.get(0, 0, 1).unwrap();
        assert!((g.get(0, 0, 1).unwrap() - c0 * C::from_polar(1.0, -1.3 * t)).norm() < 1e-15);
    }

    #[test]
    fn semigroup_property_and_isometry() {
        let op = DispersiveOperator::new(0.0, 2.0).unwrap();
        let mut f = single(3, -2);
        f.coeffs[f.grid.index(0, 5, 1)] = C::new(0.2, 0.1);
        let ab = semigroup_apply(&semigroup_apply(&f, 0.7, &op).unwrap(), 1.9, &op).unwrap();
        let c = semigroup_apply(&f, 2.6, &op).unwrap();
        assert!(ab.sub(&c).unwrap().max_abs() < 1e-12);
        assert!((c.norm_l2() - f.norm_l2()).abs() < 1e-12);
    }

    #[test]
    fn kernel_and_sector_errors() {
        let op = DispersiveOperator::new(0.1, 1.0).unwrap();
        assert!(matches!(semigroup_apply(&single(2, 0), 1.0, &op), Err(Error::Kernel(_))));
        let mut f = single(1, 1);
        f.coeffs[f.grid.index(1, 1, 1)] = C::new(1.0, 0.0);
        assert!(matches!(semigroup_apply(&f, 1.0, &op), Err(Error::WrongSector(_))));
    }
}

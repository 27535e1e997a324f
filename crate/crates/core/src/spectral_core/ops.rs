use super::field::SpectralField;
use super::grid::{Grid, ModeClass, WaveVector};
use super::transform::{fft3, forward_complex};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

const KERNEL_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    /// The sheared derivative `d_y - t d_x`.
    YL,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    /// `|grad_L|` at `(k, eta - tk, l)`.
    GradL,
    /// `|grad_{x,z}|` at `(k, l)`.
    GradXZ,
    /// `|d_z|` at `l`.
    DZ,
    /// `<grad>` at `(k, eta, l)`.
    Bracket,
    /// `|grad_{y,z}|` at `(eta, l)`.
    GradYZ,
}

impl Symbol {
    pub fn eval(self, w: WaveVector, t: f64) -> f64 {
        match self {
            Symbol::GradL => w.sheared_norm_sq(t).sqrt(),
            Symbol::GradXZ => w.xz_norm(),
            Symbol::DZ => (w.l as f64).abs(),
            Symbol::Bracket => w.bracket(),
            Symbol::GradYZ => (w.eta * w.eta + (w.l * w.l) as f64).sqrt(),
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("time t = {t} must be finite and non-negative")))
    }
}

pub fn moving_derivative(f: &SpectralField, axis: Axis, t: f64) -> Result<SpectralField> {
    check_time(t)?;
    let g = f.grid;
    let coeffs = f
        .coeffs
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            if g.is_nyquist(i) {
                return Complex64::new(0.0, 0.0);
            }
            let w = g.wave_vector(i);
            let m = match axis {
                Axis::X => w.k as f64,
                Axis::YL => w.sheared_eta(t),
                Axis::Z => w.l as f64,
            };
            c * Complex64::new(0.0, m)
        })
        .collect();
    Ok(SpectralField { grid: g, coeffs })
}

/// Applies `symbol^exponent` mode by mode.  Negative powers require the
/// field to vanish on the kernel of the symbol.
pub fn fractional_multiplier(f: &SpectralField, symbol: Symbol, exponent: f64, t: f64) -> Result<SpectralField> {
    check_time(t)?;
    if !exponent.is_finite() {
        return Err(Error::Domain(format!("exponent {exponent} not finite")));
    }
    let g = f.grid;
    let tol = KERNEL_TOL * f.norm_l2();
    let mut out = Vec::with_capacity(g.len());
    for (i, c) in f.coeffs.iter().enumerate() {
        if g.is_nyquist(i) {
            out.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let w = g.wave_vector(i);
        let s = symbol.eval(w, t);
        if s == 0.0 {
            if exponent < 0.0 && c.norm() > tol {
                return Err(Error::SingularSymbol { k: w.k, eta: w.eta, l: w.l });
            }
            out.push(if exponent == 0.0 { *c } else { Complex64::new(0.0, 0.0) });
        } else {
            out.push(c * s.powf(exponent));
        }
    }
    Ok(SpectralField { grid: g, coeffs: out })
}

pub fn project_modes(f: &SpectralField, class: ModeClass) -> SpectralField {
    let g = f.grid;
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| if g.wave_vector(i).class() == class { *c } else { Complex64::new(0.0, 0.0) })
        .collect();
    SpectralField { grid: g, coeffs }
}

/// Zeroes every mode outside the 2/3-rule band.
pub fn dealias_truncate(f: &SpectralField) -> SpectralField {
    let g = f.grid;
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| if g.is_retained(i) { *c } else { Complex64::new(0.0, 0.0) })
        .collect();
    SpectralField { grid: g, coeffs }
}

pub fn dealias_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.check_grid(g)?;
    let grid = f.grid;
    let mut a = dealias_truncate(f).coeffs;
    let mut b = dealias_truncate(g).coeffs;
    fft3(&mut a, &grid, false);
    fft3(&mut b, &grid, false);
    let prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    Ok(dealias_truncate(&forward_complex(prod, grid)?))
}

/// Orthogonal projection onto `k U1 + (eta - tk) U2 + l U3 = 0`.
pub fn leray_project(u: [&SpectralField; 3], t: f64) -> Result<[SpectralField; 3]> {
    check_time(t)?;
    u[0].check_grid(u[1])?;
    u[0].check_grid(u[2])?;
    let g: Grid = u[0].grid;
    let mut out = [u[0].clone(), u[1].clone(), u[2].clone()];
    for i in 0..g.len() {
        let w = g.wave_vector(i);
        let q2 = w.sheared_norm_sq(t);
        if q2 == 0.0 || g.is_nyquist(i) {
            for c in out.iter_mut() {
                c.coeffs[i] = Complex64::new(0.0, 0.0);
            }
            continue;
        }
        let v = [w.k as f64, w.sheared_eta(t), w.l as f64];
        let div = v[0] * u[0].coeffs[i] + v[1] * u[1].coeffs[i] + v[2] * u[2].coeffs[i];
        for (c, vj) in out.iter_mut().zip(v) {
            c.coeffs[i] -= div * (vj / q2);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::transform::{forward_transform, inverse_transform};
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(8, 8, 8, 4.0 * PI).unwrap()
    }

    #[test]
    fn sheared_derivative_factor() {
        let g = grid();
        let mut f = SpectralField::zeros(g);
        f.set_hermitian(1, 1, 0, Complex64::new(1.0, 0.0)).unwrap();
        f.set_hermitian(0, 2, 1, Complex64::new(1.0, 0.0)).unwrap();
        let d = moving_derivative(&f, Axis::YL, 3.0).unwrap();
        let eta = g.eta_unit();
        assert!((d.get(1, 1, 0).unwrap() - Complex64::new(0.0, eta - 3.0)).norm() < 1e-14);
        assert!((d.get(0, 2, 1).unwrap() - Complex64::new(0.0, 2.0 * eta)).norm() < 1e-14);
        assert!(d.hermitian_defect() < 1e-14);
        assert!(moving_derivative(&f, Axis::X, f64::NAN).is_err());
    }

    #[test]
    fn laplacian_symbol_at_t0() {
        let g = grid();
        let f = SpectralField::from_fn(g, |_| Complex64::new(1.0, 0.0));
        let l2 = fractional_multiplier(&f, Symbol::GradL, 2.0, 0.0).unwrap();
        for i in 0..g.len() {
            if !g.is_nyquist(i) {
                assert!((l2.coeffs[i].re - g.wave_vector(i).norm_sq()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_symbol_reported() {
        let g = grid();
        let mut f = SpectralField::zeros(g);
        f.set_hermitian(0, 1, 0, Complex64::new(1.0, 0.0)).unwrap();
        let err = fractional_multiplier(&f, Symbol::GradXZ, -0.5, 0.0).unwrap_err();
        assert!(matches!(err, Error::SingularSymbol { k: 0, l: 0, .. }));
        let nz = project_modes(&f, ModeClass::NonZero);
        assert!(fractional_multiplier(&nz, Symbol::GradXZ, -0.5, 0.0).is_ok());
    }

    #[test]
    fn cosine_square() {
        let g = grid();
        let c = forward_transform(&g.sample(|x, _, _| x.cos()), g).unwrap();
        let p = dealias_product(&c, &c).unwrap();
        let phys = inverse_transform(&p);
        let expect = g.sample(|x, _, _| 0.5 + 0.5 * (2.0 * x).cos());
        for (a, b) in phys.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn gradient_is_removed() {
        let g = grid();
        let phi = forward_transform(&g.sample(|x, y, z| (x + 0.5 * y).sin() * z.cos()), g).unwrap();
        let t = 0.7;
        let gr = [
            moving_derivative(&phi, Axis::X, t).unwrap(),
            moving_derivative(&phi, Axis::YL, t).unwrap(),
            moving_derivative(&phi, Axis::Z, t).unwrap(),
        ];
        let p = leray_project([&gr[0], &gr[1], &gr[2]], t).unwrap();
        for c in &p {
            assert!(c.max_abs() < 1e-14);
        }
    }
}

use crate::error::{Error, Result};
use crate::spectral_core::{Grid, SpectralField};
use num_complex::Complex64;
use rayon::prelude::*;

type C = Complex64;

/// `(U^1, U^2, Theta)` restricted to the `k = 0` plane.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroModeData {
    pub u1: SpectralField,
    pub u2: SpectralField,
    pub theta: SpectralField,
}

impl ZeroModeData {
    pub fn new(u1: SpectralField, u2: SpectralField, theta: SpectralField) -> Result<Self> {
        u1.check_grid(&u2)?;
        u1.check_grid(&theta)?;
        let g = u1.grid;
        for f in [&u1, &u2, &theta] {
            let stray = f.coeffs.iter().enumerate().any(|(i, c)| g.wave_vector(i).k != 0 && *c != C::new(0.0, 0.0));
            if stray {
                return Err(Error::WrongSector("zero-mode data has k != 0 content".into()));
            }
        }
        Ok(Self { u1, u2, theta })
    }

    pub fn grid(&self) -> Grid {
        self.u1.grid
    }

    pub fn norm(&self) -> f64 {
        (self.u1.norm_l2().powi(2) + self.u2.norm_l2().powi(2) + self.theta.norm_l2().powi(2)).sqrt()
    }
}

/// `sin(wt)/w` and `(1 - cos(wt))/w^2`, continuous through `w = 0`.
fn kernels(w: f64, t: f64) -> (f64, f64) {
    let x = w * t;
    if x.abs() < 1e-4 {
        let x2 = x * x;
        (t * (1.0 - x2 / 6.0), t * t * (0.5 - x2 / 24.0))
    } else {
        ((x).sin() / w, (1.0 - x.cos()) / (w * w))
    }
}

/// Closed-form solution of the linearised zero-mode system at time `t`.
pub fn zero_mode_exact(data: &ZeroModeData, nu: f64, beta: f64, t: f64) -> Result<ZeroModeData> {
    if !(t >= 0.0) || !(nu >= 0.0) || !beta.is_finite() || beta < 0.0 {
        return Err(Error::Domain(format!("zero_mode_exact: t = {t}, nu = {nu}, beta = {beta}")));
    }
    let g = data.grid();
    let n = g.len();
    let vals: Vec<(C, C, C)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let w = g.wave_vector(i);
            let (u1, u2, th) = (data.u1.coeffs[i], data.u2.coeffs[i], data.theta.coeffs[i]);
            if w.k != 0 {
                return (u1, u2, th);
            }
            let q2 = w.norm_sq();
            let l2 = (w.l * w.l) as f64;
            let a = if q2 > 0.0 { beta * l2 / q2 } else { 0.0 };
            let omega = (a * beta).sqrt();
            let h = (-nu * q2 * t).exp();
            let (sn, cm) = kernels(omega, t);
            let cs = (omega * t).cos();
            ((u1 - u2 * sn + th * (a * cm)) * h, (u2 * cs - th * (a * sn)) * h, (th * cs + u2 * (beta * sn)) * h)
        })
        .collect();
    let mut out =
        ZeroModeData { u1: SpectralField::zeros(g), u2: SpectralField::zeros(g), theta: SpectralField::zeros(g) };
    for (i, (a, b, c)) in vals.into_iter().enumerate() {
        out.u1.coeffs[i] = a;
        out.u2.coeffs[i] = b;
        out.theta.coeffs[i] = c;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct LiftupReport {
    pub times: Vec<f64>,
    /// `||U^1_0(t)||` without buoyancy.
    pub u1_beta0: Vec<f64>,
    pub u1_beta: Vec<f64>,
    pub data_norm: f64,
    pub max_beta0: f64,
    pub max_beta: f64,
    /// `max_beta / data_norm`
    pub ratio: f64,
}

/// Lift-up with and without stratification, sampled uniformly on `[0, t_end]`.
pub fn liftup_diagnostic(
    data: &ZeroModeData,
    nu: f64,
    beta: f64,
    t_end: f64,
    n_samples: usize,
) -> Result<LiftupReport> {
    if n_samples < 2 || !(t_end > 0.0) {
        return Err(Error::Domain(format!("liftup_diagnostic: t_end = {t_end}, samples = {n_samples}")));
    }
    if data.u2.norm_l2() == 0.0 {
        return Err(Error::Domain("lift-up comparison needs nonzero U^2_0".into()));
    }
    let times: Vec<f64> = (0..n_samples).map(|i| t_end * i as f64 / (n_samples - 1) as f64).collect();
    let mut u1_beta0 = Vec::with_capacity(n_samples);
    let mut u1_beta = Vec::with_capacity(n_samples);
    for &t in &times {
        u1_beta0.push(zero_mode_exact(data, nu, 0.0, t)?.u1.norm_l2());
        u1_beta.push(zero_mode_exact(data, nu, beta, t)?.u1.norm_l2());
    }
    let max_beta0 = u1_beta0.iter().cloned().fold(0.0, f64::max);
    let max_beta = u1_beta.iter().cloned().fold(0.0, f64::max);
    let data_norm = data.norm();
    Ok(LiftupReport { times, u1_beta0, u1_beta, data_norm, max_beta0, max_beta, ratio: max_beta / data_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_dynamics::zero_mode_matrix;

    fn one_mode(n: i64, l: i64, u: [C; 3]) -> ZeroModeData {
        let g = Grid::new(4, 16, 8, 8.0).unwrap();
        let mut f = [SpectralField::zeros(g), SpectralField::zeros(g), SpectralField::zeros(g)];
        for (fi, c) in f.iter_mut().zip(u) {
            fi.set_hermitian(0, n, l, c).unwrap();
        }
        let [a, b, c] = f;
        ZeroModeData::new(a, b, c).unwrap()
    }

    #[test]
    fn linear_growth_without_buoyancy() {
        let d = one_mode(1, 1, [C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)]);
        let s = zero_mode_exact(&d, 0.0, 0.0, 5.0).unwrap();
        let v = s.u1.get(0, 1, 1).unwrap();
        assert!((v + 5.0).norm() < 1e-14);
    }

    #[test]
    fn matches_rk4_of_matrix() {
        let (nu, beta, n, l) = (0.01, 1.3, 2, -1);
        let u0 = [C::new(0.3, -0.1), C::new(1.0, 0.2), C::new(-0.4, 0.5)];
        let d = one_mode(n, l, u0);
        let eta = n as f64 * d.grid().eta_unit();
        let m = zero_mode_matrix(eta, l, nu, beta);
        let f = |x: [C; 3]| -> [C; 3] { std::array::from_fn(|r| (0..3).map(|c| x[c] * m[r][c]).sum()) };
        let mut x = u0;
        let h = 1e-3;
        for _ in 0..3000 {
            let k1 = f(x);
            let k2 = f(std::array::from_fn(|i| x[i] + k1[i] * (h / 2.0)));
            let k3 = f(std::array::from_fn(|i| x[i] + k2[i] * (h / 2.0)));
            let k4 = f(std::array::from_fn(|i| x[i] + k3[i] * h));
            x = std::array::from_fn(|i| x[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0));
        }
        let s = zero_mode_exact(&d, nu, beta, 3.0).unwrap();
        let got = [s.u1.get(0, n, l).unwrap(), s.u2.get(0, n, l).unwrap(), s.theta.get(0, n, l).unwrap()];
        for i in 0..3 {
            assert!((got[i] - x[i]).norm() < 1e-11, "{i}: {} vs {}", got[i], x[i]);
        }
    }

    #[test]
    fn passive_scalar_is_heat() {
        let (nu, beta) = (0.02, 0.8);
        let d = one_mode(3, 2, [C::new(0.3, 0.0), C::new(-1.0, 0.4), C::new(0.7, 0.1)]);
        let t = 7.5;
        let s = zero_mode_exact(&d, nu, beta, t).unwrap();
        let g = d.grid();
        for i in 0..g.len() {
            let v0 = d.u1.coeffs[i] + d.theta.coeffs[i] / beta;
            let vt = s.u1.coeffs[i] + s.theta.coeffs[i] / beta;
            let h = (-nu * g.wave_vector(i).norm_sq() * t).exp();
            assert!((vt - v0 * h).norm() < 1e-12);
        }
    }

    #[test]
    fn stratification_caps_liftup() {
        let d = one_mode(1, 1, [C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)]);
        let r = liftup_diagnostic(&d, 1e-4, 1.0, 100.0, 201).unwrap();
        assert!(r.max_beta0 > 50.0 * r.max_beta, "{} vs {}", r.max_beta0, r.max_beta);
        assert!(liftup_diagnostic(
            &one_mode(1, 1, [C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)]),
            1e-3,
            1.0,
            1.0,
            3
        )
        .is_err());
    }

    #[test]
    fn heat_only_is_monotone() {
        let mut d = one_mode(1, 1, [C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)]);
        d.u2.coeffs.iter_mut().for_each(|c| *c = C::new(0.0, 0.0));
        let mut last = f64::INFINITY;
        for i in 0..20 {
            let n = zero_mode_exact(&d, 0.01, 1.0, i as f64).unwrap().u1.norm_l2();
            assert!(n < last);
            last = n;
        }
    }
}

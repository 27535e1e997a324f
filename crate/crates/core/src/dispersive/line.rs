use super::phase::{bump, bump_dagger, bump_tilde};
use super::semigroup::DispersiveOperator;
use crate::error::{Error, Result};
use crate::series::DiagnosticsSeries;
use crate::spectral_core::{inverse_complex, w_s1_norm, Grid, SpectralField};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

type C = Complex64;

/// Periodic line `[-L/2, L/2)` standing in for the real line, with measure `dy`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Line {
    pub n: usize,
    pub ly: f64,
}

impl Line {
    pub fn new(n: usize, ly: f64) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) || !(ly > 0.0 && ly.is_finite()) {
            return Err(Error::InvalidGrid(format!("line needs even n >= 4 and ly > 0, got n = {n}, ly = {ly}")));
        }
        Ok(Line { n, ly })
    }

    /// Long enough that waves launched from the centre do not wrap by `t beta = 100`.
    pub fn dispersive_default() -> Self {
        Line { n: 4096, ly: 64.0 * PI }
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.n as f64
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| -0.5 * self.ly + i as f64 * self.dy()).collect()
    }

    pub fn eta(&self, i: usize) -> f64 {
        Grid::signed(i, self.n) as f64 * 2.0 * PI / self.ly
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<C> {
        self.coords().into_iter().map(|y| C::new(f(y), 0.0)).collect()
    }

    /// Coefficients `c_j` with `h(y) = sum c_j e^{i eta_j (y + L/2)}`.
    pub fn forward(&self, h: &[C]) -> Vec<C> {
        let mut buf = h.to_vec();
        FftPlanner::new().plan_fft_forward(self.n).process(&mut buf);
        let inv = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= inv);
        buf
    }

    pub fn inverse(&self, c: &[C]) -> Vec<C> {
        let mut buf = c.to_vec();
        FftPlanner::new().plan_fft_inverse(self.n).process(&mut buf);
        buf
    }

    /// Fourier multiplier with symbol `m(eta)`.
    pub fn multiply<F: Fn(f64) -> C>(&self, h: &[C], m: F) -> Result<Vec<C>> {
        if h.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: h.len() });
        }
        let mut c = self.forward(h);
        for (i, v) in c.iter_mut().enumerate() {
            *v *= m(self.eta(i));
        }
        Ok(self.inverse(&c))
    }

    pub fn l1(&self, h: &[C]) -> f64 {
        h.iter().map(|c| c.norm()).sum::<f64>() * self.dy()
    }
}

/// `||<d_y>^s h||_{L^1(dy)}`.
pub fn line_w_s1_norm(h: &[C], line: &Line, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("order {s} must be non-negative")));
    }
    let f = line.multiply(h, |eta| C::new((1.0 + eta * eta).powf(0.5 * s), 0.0))?;
    Ok(line.l1(&f))
}

/// `|l|^a (l^2 - d_y^2)^{-a/2} e^{t beta R^l} h`, given `tb = t beta`.
pub fn line_semigroup(h: &[C], line: &Line, l: i64, tb: f64, a: f64) -> Result<Vec<C>> {
    if l == 0 {
        return Err(Error::Kernel("R^l vanishes for l = 0".into()));
    }
    line.multiply(h, |eta| {
        let d = DispersiveOperator::dispersion(eta, l);
        C::from_polar(d.powf(a), tb * d)
    })
}

/// Smallest and largest Littlewood-Paley index resolved on the line.
///
/// The lowest band absorbs every dyadic piece below the box frequency.
pub fn lp_band_range(line: &Line) -> (i32, i32) {
    let eta_min = 2.0 * PI / line.ly;
    let eta_max = (line.n / 2) as f64 * eta_min;
    (eta_min.log2().floor() as i32, (eta_max / 1.5).log2().ceil() as i32)
}

fn band_symbol(line: &Line, j: i32, dagger: bool) -> impl Fn(f64) -> f64 {
    let (lo, _) = lp_band_range(line);
    let s = 2f64.powi(-j);
    move |eta: f64| {
        if j < lo || eta == 0.0 {
            0.0
        } else if j == lo {
            // merged low band: sum_{i <= lo} phi(2^{-i} eta) on the lattice
            if dagger {
                bump_tilde(0.5 * s * eta)
            } else {
                bump_tilde(s * eta)
            }
        } else if dagger {
            bump_dagger(s * eta)
        } else {
            bump(s * eta)
        }
    }
}

/// `P_j h`; the bands from [`lp_band_range`] sum to `h` minus its mean.
pub fn littlewood_paley_project(h: &[C], line: &Line, j: i32) -> Result<Vec<C>> {
    let m = band_symbol(line, j, false);
    line.multiply(h, |eta| C::new(m(eta), 0.0))
}

/// `P^dagger_j h`, with `P_j = P_j P^dagger_j`.
pub fn littlewood_paley_dagger(h: &[C], line: &Line, j: i32) -> Result<Vec<C>> {
    let m = band_symbol(line, j, true);
    line.multiply(h, |eta| C::new(m(eta), 0.0))
}

pub const DECAY_COLUMNS: [&str; 4] = ["t", "sup", "normalized", "bound"];

/// `sup |e^{t beta R^l} h|` and its `(t beta)^{1/3}` normalisation; `bound` is
/// `|l| ||h||_{W^{2,1}}`, the right-hand side up to the constant.
pub fn sup_decay_scan(h: &[C], line: &Line, l: i64, beta: f64, times: &[f64], a: f64) -> Result<DiagnosticsSeries> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta = {beta} must be positive")));
    }
    let bound = l.unsigned_abs() as f64 * line_w_s1_norm(h, line, 2.0)?;
    let rows: Vec<Vec<f64>> = times
        .par_iter()
        .map(|&t| {
            let tb = t * beta;
            let sup = line_semigroup(h, line, l, tb, a)?.iter().map(|c| c.norm()).fold(0.0, f64::max);
            Ok(vec![t, sup, sup * tb.cbrt(), bound])
        })
        .collect::<Result<_>>()?;
    let mut out = DiagnosticsSeries::new(&DECAY_COLUMNS);
    for r in rows {
        out.push(r)?;
    }
    Ok(out)
}

/// Box version with viscosity: `sup |e^{tL} f|` normalised by
/// `e^{-nu t} (t beta)^{-1/3}`, against `||f||_{W^{4,1}}`.
pub fn composite_decay_scan(f: &SpectralField, op: &DispersiveOperator, times: &[f64]) -> Result<DiagnosticsSeries> {
    let bound = w_s1_norm(f, 4.0)?;
    let f = super::semigroup::semigroup_apply(f, 0.0, op)?;
    let mut out = DiagnosticsSeries::new(&DECAY_COLUMNS);
    for &t in times {
        let g = op.apply_unchecked(&f, t);
        let sup = inverse_complex(&g).iter().map(|c| c.norm()).fold(0.0, f64::max);
        out.push(vec![t, sup, sup * (op.nu * t).exp() * (t * op.beta).cbrt(), bound])?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(line: &Line) -> Vec<C> {
        line.sample(|y| (-y * y).exp())
    }

    #[test]
    fn roundtrip_and_l1() {
        let line = Line::new(256, 40.0).unwrap();
        let h = gaussian(&line);
        let back = line.inverse(&line.forward(&h));
        assert!(h.iter().zip(&back).all(|(a, b)| (a - b).norm() < 1e-14));
        assert!((line.l1(&h) - PI.sqrt()).abs() < 1e-12);
        // W^{0,1} is L^1
        assert!((line_w_s1_norm(&h, &line, 0.0).unwrap() - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bands_sum_to_identity() {
        let line = Line::new(512, 16.0 * PI).unwrap();
        let h = line.sample(|y| (-y * y / 4.0).exp() * (1.0 + y.sin()));
        let mean = line.forward(&h)[0];
        let (lo, hi) = lp_band_range(&line);
        let mut sum = vec![C::new(0.0, 0.0); line.n];
        for j in lo..=hi {
            for (s, p) in sum.iter_mut().zip(littlewood_paley_project(&h, &line, j).unwrap()) {
                *s += p;
            }
        }
        for (s, v) in sum.iter().zip(&h) {
            assert!((s + mean - v).norm() < 1e-10);
        }
    }

    #[test]
    fn band_support_of_pure_frequency() {
        let line = Line::new(256, 2.0 * PI).unwrap();
        let eta0 = 5.0;
        let h = line.sample(|y| (eta0 * y).cos());
        let (lo, hi) = lp_band_range(&line);
        for j in lo..=hi + 2 {
            let p = littlewood_paley_project(&h, &line, j).unwrap();
            let n = line.l1(&p);
            if bump(eta0 / 2f64.powi(j)) > 0.0 && j > lo {
                assert!(n > 1e-3);
            }
            if 2f64.powi(j - 1) > 2.0 * eta0 {
                assert!(n < 1e-14);
            }
        }
    }

    #[test]
    fn dagger_reproduces_band() {
        let line = Line::new(512, 16.0 * PI).unwrap();
        let h = gaussian(&line);
        let (lo, hi) = lp_band_range(&line);
        for j in lo..=hi {
            let p = littlewood_paley_project(&h, &line, j).unwrap();
            let pp = littlewood_paley_dagger(&p, &line, j).unwrap();
            assert!(p.iter().zip(&pp).all(|(a, b)| (a - b).norm() < 1e-13), "band {j}");
        }
    }

    #[test]
    fn beta_scaling_is_exact() {
        let line = Line::new(1024, 32.0 * PI).unwrap();
        let h = gaussian(&line);
        let times = [1.0, 2.5, 7.0];
        let a = sup_decay_scan(&h, &line, 1, 4.0, &times, 0.0).unwrap();
        let four: Vec<f64> = times.iter().map(|t| 4.0 * t).collect();
        let b = sup_decay_scan(&h, &line, 1, 1.0, &four, 0.0).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert!((x[1] - y[1]).abs() < 1e-14);
        }
    }
}

use crate::error::{Error, Result};
use crate::linear_dynamics::{rate_fit, FitModel, FitResult};
use crate::quadrature::{integrate_complex, Tolerance};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::FRAC_1_SQRT_2;

type C = Complex64;

fn smooth_step(u: f64) -> f64 {
    // 0 for u <= 0, 1 for u >= 1, C-infinity in between
    let f = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let (a, b) = (f(u), f(1.0 - u));
    a / (a + b)
}

/// Even bump: 1 on `[-3/2, 3/2]`, 0 outside `[-2, 2]`.
pub fn bump_tilde(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.5 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        smooth_step((2.0 - a) / 0.5)
    }
}

/// Dyadic piece `phi(x) = phi~(x) - phi~(2x)`, supported in `3/4 <= |x| <= 2`.
pub fn bump(x: f64) -> f64 {
    bump_tilde(x) - bump_tilde(2.0 * x)
}

/// Fattened piece, identically 1 on the support of [`bump`].
pub fn bump_dagger(x: f64) -> f64 {
    bump_tilde(0.5 * x) - bump_tilde(4.0 * x)
}

/// `Phi(xi) = r xi - (1 + xi^2)^{-1/2}` with `r = y l / (t beta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseFunction {
    pub r: f64,
}

impl PhaseFunction {
    /// Inflection point of the dispersive part.
    pub const XI0: f64 = FRAC_1_SQRT_2;

    pub fn new(r: f64) -> Self {
        PhaseFunction { r }
    }

    pub fn at_position(y: f64, l: i64, tb: f64) -> Self {
        PhaseFunction { r: y * l as f64 / tb }
    }

    /// The ratio at which `xi0` is a degenerate stationary point.
    pub fn degenerate_ratio() -> f64 {
        -2.0 / (3.0 * 3f64.sqrt())
    }

    /// Ratio that makes `xi` stationary.
    pub fn stationary_ratio(xi: f64) -> f64 {
        -xi * (1.0 + xi * xi).powf(-1.5)
    }

    pub fn value(&self, xi: f64) -> f64 {
        self.r * xi - 1.0 / (1.0 + xi * xi).sqrt()
    }

    pub fn d1(&self, xi: f64) -> f64 {
        self.r + xi * (1.0 + xi * xi).powf(-1.5)
    }

    pub fn d2(&self, xi: f64) -> f64 {
        (1.0 - 2.0 * xi * xi) * (1.0 + xi * xi).powf(-2.5)
    }

    pub fn d3(&self, xi: f64) -> f64 {
        let s = 1.0 + xi * xi;
        (6.0 * xi.powi(3) - 9.0 * xi) * s.powf(-3.5)
    }
}

/// `j0 = log2 |l| - 5/2`; the band `[j0, j0 + 4]` can contain `xi0`.
pub fn resonant_band_start(l: i64) -> f64 {
    (l.unsigned_abs() as f64).log2() - 2.5
}

/// Positive half of the support of `xi -> phi(2^{-j} l xi)`.
pub fn oracle_support(l: i64, j: i32) -> (f64, f64) {
    let s = 2f64.powi(j) / l.unsigned_abs() as f64;
    (0.75 * s, 2.0 * s)
}

/// `I(tb, l, j) = int e^{i tb Phi(xi)} phi(2^{-j} l xi) dxi` by adaptive quadrature.
pub fn stationary_phase_oracle(tb: f64, l: i64, j: i32, r: f64) -> Result<C> {
    if !(tb > 0.0 && tb.is_finite()) {
        return Err(Error::Domain(format!("tb = {tb} must be positive")));
    }
    if l == 0 {
        return Err(Error::Domain("oscillatory integral needs l != 0".into()));
    }
    let phase = PhaseFunction::new(r);
    let scale = l as f64 / 2f64.powi(j);
    let s = 2f64.powi(j) / l.unsigned_abs() as f64;
    let f = |xi: f64| C::from_polar(bump(scale * xi), tb * phase.value(xi));
    // breakpoints where the bump changes regime
    let knots = [0.75 * s, s, 1.5 * s, 2.0 * s];
    let mut total = C::new(0.0, 0.0);
    for sign in [-1.0, 1.0] {
        for w in knots.windows(2) {
            let (a, b) = if sign > 0.0 { (w[0], w[1]) } else { (-w[1], -w[0]) };
            let est = integrate_complex(f, a, b, Tolerance::absolute(1e-10 / 6.0)).map_err(|_| Error::Quadrature {
                a,
                b,
                context: format!("stationary phase tb = {tb}, l = {l}, j = {j}, r = {r}"),
            })?;
            total += est.value;
        }
    }
    Ok(total)
}

/// Power-law fit of `|I|` against `tb`, over the full window and over the
/// part of it where the cubic (Airy) scale around `xi0` fits inside the bump.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub samples: Vec<(f64, f64)>,
    pub full: FitResult,
    /// Present when at least ten samples satisfy the window rule.
    pub asymptotic: Option<FitResult>,
    pub window_start: f64,
}

/// Airy scale `(6 / (|Phi'''(xi0)| tb))^{1/3}` of a degenerate point.
fn airy_scale(tb: f64) -> f64 {
    let d3 = PhaseFunction::new(0.0).d3(PhaseFunction::XI0).abs();
    (6.0 / (d3 * tb)).cbrt()
}

/// Samples `|I|` at `n` log-spaced `tb` in `[tb_min, tb_max]` and fits a power law.
pub fn decay_fit(l: i64, j: i32, r: f64, tb_min: f64, tb_max: f64, n: usize) -> Result<DecayFit> {
    if !(tb_min > 0.0 && tb_max > tb_min) || n < 10 {
        return Err(Error::Domain(format!("decay_fit: tb in [{tb_min}, {tb_max}], n = {n}")));
    }
    let ratio = (tb_max / tb_min).ln() / (n - 1) as f64;
    let samples: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let tb = tb_min * (ratio * i as f64).exp();
            Ok((tb, stationary_phase_oracle(tb, l, j, r)?.norm()))
        })
        .collect::<Result<_>>()?;
    let full = rate_fit(&samples, FitModel::Power)?;
    let (a, b) = oracle_support(l, j);
    let xi0 = PhaseFunction::XI0;
    let room = if xi0 > a && xi0 < b { (xi0 - a).min(b - xi0) } else { 0.0 };
    // delta(tb) <= room / 2
    let d3 = PhaseFunction::new(0.0).d3(xi0).abs();
    let window_start = if room > 0.0 { 6.0 / (d3 * (0.5 * room).powi(3)) } else { f64::INFINITY };
    let late: Vec<_> = samples.iter().copied().filter(|&(tb, _)| airy_scale(tb) <= 0.5 * room).collect();
    let asymptotic = if late.len() >= 10 { Some(rate_fit(&late, FitModel::Power)?) } else { None };
    Ok(DecayFit { samples, full, asymptotic, window_start })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bumps_partition_and_nest() {
        for i in 0..4000 {
            let x = 0.01 + i as f64 * 1e-3;
            let sum: f64 = (-12..12).map(|j| bump(x / 2f64.powi(j))).sum();
            assert!((sum - 1.0).abs() < 1e-14, "{x}");
            if bump(x) != 0.0 {
                assert_eq!(bump_dagger(x), 1.0);
            }
        }
        assert_eq!(bump(0.7), 0.0);
        assert_eq!(bump(1.2), 1.0);
    }

    #[test]
    fn phase_derivatives() {
        let p = PhaseFunction::new(0.3);
        for xi in [-1.3, -0.2, 0.4, 2.5] {
            let h = 1e-5;
            assert!(((p.value(xi + h) - p.value(xi - h)) / (2.0 * h) - p.d1(xi)).abs() < 1e-9);
            assert!(((p.d1(xi + h) - p.d1(xi - h)) / (2.0 * h) - p.d2(xi)).abs() < 1e-9);
            assert!(((p.d2(xi + h) - p.d2(xi - h)) / (2.0 * h) - p.d3(xi)).abs() < 1e-9);
        }
        let c = PhaseFunction::new(PhaseFunction::degenerate_ratio());
        assert!(c.d1(PhaseFunction::XI0).abs() < 1e-15 && c.d2(PhaseFunction::XI0).abs() < 1e-15);
    }

    #[test]
    fn oracle_small_tb_is_bump_integral() {
        // tb -> 0: I -> int phi(2^{-j} l xi) dxi = 2^j / |l| int phi
        let i0 = stationary_phase_oracle(1e-9, 2, 1, 0.0).unwrap();
        let mass = crate::quadrature::integrate(bump, -2.0, 2.0, Tolerance::absolute(1e-12)).unwrap().value;
        assert!((i0.re - mass).abs() < 1e-8 && i0.im.abs() < 1e-8);
        assert!(stationary_phase_oracle(1.0, 0, 0, 0.0).is_err());
    }
}

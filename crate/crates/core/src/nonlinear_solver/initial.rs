use super::state::{FlowState, Primitive};
use crate::error::{Error, Result};
use crate::spectral_core::{leray_project, sobolev_norm, w_s1_norm, Grid, SpectralField, WaveVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

type C = Complex64;

/// Spectral profile of the data before normalisation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Gaussian envelope `exp(-|k,eta,l|^2 / (2 width^2))` with random phases.
    RandomPhase { spectral_width: f64 },
    /// One Fourier mode `(k, n, l)` (and its conjugate) in every component.
    Mode { k: i64, n: i64, l: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec {
    pub amplitude: f64,
    pub shape: Shape,
    pub seed: u64,
    #[serde(default = "default_true")]
    pub enforce_xz_mean_zero: bool,
}

fn default_true() -> bool {
    true
}

impl Default for InitialDataSpec {
    fn default() -> Self {
        InitialDataSpec {
            amplitude: 1e-3,
            shape: Shape::RandomPhase { spectral_width: 2.0 },
            seed: 0,
            enforce_xz_mean_zero: true,
        }
    }
}

/// Initial state with the norms it was scaled by.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub state: FlowState,
    pub spec: InitialDataSpec,
    /// `|u|_{H^{2m+1}} + |theta|_{H^{2m+1}}`, equal to the amplitude.
    pub h_norm: f64,
    /// `|u|_{W^{2m+5,1}} + |theta|_{W^{2m+5,1}}`, recorded only.
    pub w_norm: f64,
}

fn in_band(grid: Grid, k: i64, n: i64, l: i64) -> bool {
    let ok = |m: i64, len: usize| 3 * m.unsigned_abs() < (len / 2) as u64;
    ok(k, grid.nx) && ok(n, grid.ny) && ok(l, grid.nz)
}

fn random_fields(grid: Grid, width: f64, rng: &mut ChaCha8Rng) -> Result<[SpectralField; 4]> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::Config {
            field: "shape.spectral_width".into(),
            message: format!("{width} must be positive"),
        });
    }
    let mut out: [SpectralField; 4] = std::array::from_fn(|_| SpectralField::zeros(grid));
    let (hx, hy, hz) = ((grid.nx / 2) as i64, (grid.ny / 2) as i64, (grid.nz / 2) as i64);
    for k in 0..hx {
        for n in -hy + 1..hy {
            for l in -hz + 1..hz {
                // one representative per conjugate pair
                if k == 0 && (n < 0 || (n == 0 && l <= 0)) {
                    continue;
                }
                if !in_band(grid, k, n, l) {
                    continue;
                }
                let eta = n as f64 * grid.eta_unit();
                let env = (-((k * k + l * l) as f64 + eta * eta) / (2.0 * width * width)).exp();
                for f in out.iter_mut() {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    f.set_hermitian(k, n, l, C::new(re, im) * env)?;
                }
            }
        }
    }
    Ok(out)
}

fn mode_fields(grid: Grid, k: i64, n: i64, l: i64, rng: &mut ChaCha8Rng) -> Result<[SpectralField; 4]> {
    if !in_band(grid, k, n, l) {
        return Err(Error::Config {
            field: "shape".into(),
            message: format!("mode ({k},{n},{l}) outside the lower third"),
        });
    }
    let mut out: [SpectralField; 4] = std::array::from_fn(|_| SpectralField::zeros(grid));
    for f in out.iter_mut() {
        let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        f.set_hermitian(k, n, l, C::from_polar(1.0, phase))?;
    }
    Ok(out)
}

fn drop_xz_mean(f: &SpectralField) -> SpectralField {
    f.map_symbol(|w: WaveVector| C::new(if w.k == 0 && w.l == 0 { 0.0 } else { 1.0 }, 0.0))
}

/// Band-limited, solenoidal data scaled to `|u|_{H^{2m+1}} + |theta|_{H^{2m+1}} = amplitude`.
pub fn make_initial_data(spec: &InitialDataSpec, grid: Grid, m: u32) -> Result<InitialData> {
    if !(spec.amplitude >= 0.0 && spec.amplitude.is_finite()) {
        return Err(Error::Config {
            field: "initial.amplitude".into(),
            message: format!("{} must be non-negative", spec.amplitude),
        });
    }
    let zero = InitialData { state: FlowState::zeros(grid, 0.0), spec: *spec, h_norm: 0.0, w_norm: 0.0 };
    if spec.amplitude == 0.0 {
        return Ok(zero);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let [a, b, c, theta] = match spec.shape {
        Shape::RandomPhase { spectral_width } => random_fields(grid, spectral_width, &mut rng)?,
        Shape::Mode { k, n, l } => mode_fields(grid, k, n, l, &mut rng)?,
    };
    let [mut u1, mut u2, mut u3] = leray_project([&a, &b, &c], 0.0)?;
    let mut theta = theta;
    if spec.enforce_xz_mean_zero {
        u1 = drop_xz_mean(&u1);
        u3 = drop_xz_mean(&u3);
        theta = drop_xz_mean(&theta);
    }
    // the k = l = 0 part of U^2 is not representable through G
    u2 = drop_xz_mean(&u2);
    let s = 2.0 * m as f64 + 1.0;
    let h = |fs: &[&SpectralField]| -> Result<f64> {
        Ok(fs.iter().map(|f| sobolev_norm(f, s).map(|v| v * v)).sum::<Result<f64>>()?.sqrt())
    };
    let h_norm = h(&[&u1, &u2, &u3])? + h(&[&theta])?;
    if h_norm == 0.0 {
        return Ok(zero);
    }
    let r = spec.amplitude / h_norm;
    let prim = Primitive { u: [u1.scale(r), u2.scale(r), u3.scale(r)], theta: theta.scale(r) };
    let ws = s + 4.0;
    let w_norm = prim.u.iter().map(|f| w_s1_norm(f, ws)).sum::<Result<f64>>()? + w_s1_norm(&prim.theta, ws)?;
    let state = FlowState::from_primitive(&prim, 0.0)?;
    Ok(InitialData { state, spec: *spec, h_norm: spec.amplitude, w_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(16, 16, 16, 4.0 * PI).unwrap()
    }

    #[test]
    fn zero_amplitude_gives_zero_state() {
        let spec = InitialDataSpec { amplitude: 0.0, ..Default::default() };
        let d = make_initial_data(&spec, grid(), 3).unwrap();
        assert_eq!(d.state, FlowState::zeros(grid(), 0.0));
    }

    #[test]
    fn solenoidal_mean_free_and_scaled() {
        let spec = InitialDataSpec { amplitude: 1e-3, seed: 7, ..Default::default() };
        let d = make_initial_data(&spec, grid(), 3).unwrap();
        let s = &d.state;
        assert!(s.divergence() < 1e-15);
        assert_eq!(s.theta_bar0.max_abs(), 0.0);
        let p = s.primitive();
        for f in [&p.u[0], &p.u[2], &p.theta] {
            for (i, c) in f.coeffs.iter().enumerate() {
                let w = f.grid.wave_vector(i);
                if w.k == 0 && w.l == 0 {
                    assert!(c.norm() <= 1e-13);
                }
            }
        }
        let h = |f: &SpectralField| sobolev_norm(f, 7.0).unwrap().powi(2);
        let total = (h(&p.u[0]) + h(&p.u[1]) + h(&p.u[2])).sqrt() + h(&p.theta).sqrt();
        assert!((total - 1e-3).abs() < 1e-15);
        assert!(d.w_norm > 0.0);
        assert!(s.hermitian_defect() < 1e-15);
    }

    #[test]
    fn seeded_reproducibly() {
        let spec = InitialDataSpec { seed: 3, ..Default::default() };
        let a = make_initial_data(&spec, grid(), 3).unwrap();
        let b = make_initial_data(&spec, grid(), 3).unwrap();
        assert_eq!(a.state, b.state);
        let c = make_initial_data(&InitialDataSpec { seed: 4, ..spec }, grid(), 3).unwrap();
        assert_ne!(a.state, c.state);
    }

    #[test]
    fn band_limit_respected() {
        let d = make_initial_data(&InitialDataSpec::default(), grid(), 3).unwrap();
        for (i, c) in d.state.u1.coeffs.iter().enumerate() {
            let w = grid().wave_vector(i);
            let n = (w.eta / grid().eta_unit()).round() as i64;
            if c.norm() > 0.0 {
                assert!(in_band(grid(), w.k, n, w.l));
            }
        }
        let bad = InitialDataSpec { shape: Shape::Mode { k: 5, n: 0, l: 0 }, ..Default::default() };
        assert!(make_initial_data(&bad, grid(), 3).is_err());
    }
}

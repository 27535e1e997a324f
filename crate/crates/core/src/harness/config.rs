use crate::error::{Error, Result};
use crate::nonlinear_solver::{InitialDataSpec, Physics, SimulationConfig, VerdictRule, MAX_DT_BETA};
use crate::spectral_core::Grid;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Linear,
    Dispersive,
    Dns,
    Threshold,
    VerifyMultipliers,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Linear => "linear",
            Mode::Dispersive => "dispersive",
            Mode::Dns => "dns",
            Mode::Threshold => "threshold",
            Mode::VerifyMultipliers => "verify-multipliers",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicsConfig {
    pub nu: f64,
    pub beta: f64,
    #[serde(default = "default_m")]
    pub m: u32,
    /// Permits `beta = 0` (Navier-Stokes limit, lift-up regression runs).
    #[serde(default)]
    pub lift_up_regression: bool,
}

fn default_m() -> u32 {
    3
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub ly: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
    pub checkpoint_every: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BisectionConfig {
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub max_iters: u32,
    pub tol_rel: f64,
}

/// Parameter lists for threshold sweeps; empty lists fall back to the single
/// value in `physics`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(default)]
    pub nus: Vec<f64>,
    #[serde(default)]
    pub betas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub version: u32,
    pub mode: Mode,
    pub physics: PhysicsConfig,
    pub grid: GridConfig,
    pub time: TimeConfig,
    /// `initial.seed` is replaced by the top-level `seed`.
    #[serde(default)]
    pub initial: InitialDataSpec,
    pub bisection: BisectionConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default = "default_scan_samples")]
    pub scan_samples: usize,
    #[serde(default)]
    pub verdict: VerdictRule,
    #[serde(default)]
    pub horizon_cap: bool,
}

fn default_scan_samples() -> usize {
    100_000
}

impl ExperimentConfig {
    /// Desk-scale defaults for `mode`.
    pub fn default_for(mode: Mode) -> Self {
        let (grid, time) = match mode {
            Mode::Linear => (
                GridConfig { nx: 32, ny: 128, nz: 32, ly: 4.0 * PI },
                TimeConfig { dt: 0.05, t_end: 60.0, checkpoint_every: 0.5 },
            ),
            Mode::Threshold => (
                GridConfig { nx: 12, ny: 12, nz: 12, ly: 4.0 * PI },
                TimeConfig { dt: 0.05, t_end: 20.0, checkpoint_every: 1.0 },
            ),
            _ => (
                GridConfig { nx: 32, ny: 64, nz: 32, ly: 4.0 * PI },
                TimeConfig { dt: 0.05, t_end: 20.0, checkpoint_every: 0.5 },
            ),
        };
        let nu = if mode == Mode::Dispersive { 0.0 } else { 1e-2 };
        ExperimentConfig {
            version: CONFIG_VERSION,
            mode,
            physics: PhysicsConfig { nu, beta: 1.0, m: 3, lift_up_regression: false },
            grid,
            time,
            initial: InitialDataSpec::default(),
            bisection: BisectionConfig { eps_lo: 1.0, eps_hi: 1e4, max_iters: 12, tol_rel: 0.1 },
            sweep: SweepConfig::default(),
            seed: 0,
            output_dir: None,
            scan_samples: default_scan_samples(),
            verdict: VerdictRule::default(),
            horizon_cap: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config { field: "<document>".into(), message: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, message: String| Err(Error::Config { field: field.into(), message });
        if self.version != CONFIG_VERSION {
            return bad("version", format!("{} is not supported (expected {CONFIG_VERSION})", self.version));
        }
        let p = &self.physics;
        let nu_ok = if self.mode == Mode::Dispersive { p.nu >= 0.0 && p.nu < 1.0 } else { p.nu > 0.0 && p.nu < 1.0 };
        if !nu_ok {
            return bad("physics.nu", format!("{} must lie in (0,1)", p.nu));
        }
        let beta_ok = p.beta > 0.5 || (p.beta == 0.0 && p.lift_up_regression);
        if !(beta_ok && p.beta.is_finite()) {
            return bad("physics.beta", format!("{} must exceed 1/2 (0 only with lift_up_regression)", p.beta));
        }
        if p.m < 3 {
            return bad("physics.m", format!("{} must be at least 3", p.m));
        }
        let g = &self.grid;
        if [g.nx, g.ny, g.nz].iter().any(|&n| n < 4 || n % 2 == 1) {
            return bad("grid", format!("sizes {}x{}x{} must be even and at least 4", g.nx, g.ny, g.nz));
        }
        if !(g.ly > 0.0 && g.ly.is_finite()) {
            return bad("grid.ly", format!("{} must be positive", g.ly));
        }
        let t = &self.time;
        if !(t.dt > 0.0 && t.dt.is_finite()) {
            return bad("time.dt", format!("{} must be positive", t.dt));
        }
        if !(t.t_end >= 0.0 && t.t_end.is_finite()) {
            return bad("time.t_end", format!("{} must be non-negative", t.t_end));
        }
        if !(t.checkpoint_every >= t.dt) {
            return bad("time.checkpoint_every", format!("{} is shorter than dt", t.checkpoint_every));
        }
        if !(self.initial.amplitude >= 0.0 && self.initial.amplitude.is_finite()) {
            return bad("initial.amplitude", format!("{} must be non-negative", self.initial.amplitude));
        }
        let b = &self.bisection;
        if !(b.eps_lo > 0.0 && b.eps_lo < b.eps_hi && b.eps_hi.is_finite()) {
            return bad("bisection", format!("need 0 < eps_lo < eps_hi, got {} and {}", b.eps_lo, b.eps_hi));
        }
        if !(b.tol_rel > 0.0) || b.max_iters == 0 {
            return bad("bisection", "tol_rel and max_iters must be positive".into());
        }
        for &nu in &self.sweep.nus {
            if !(nu > 0.0 && nu < 1.0) {
                return bad("sweep.nus", format!("{nu} must lie in (0,1)"));
            }
        }
        for &beta in &self.sweep.betas {
            if !(beta > 0.5 && beta.is_finite()) {
                return bad("sweep.betas", format!("{beta} must exceed 1/2"));
            }
        }
        if self.scan_samples == 0 {
            return bad("scan_samples", "must be positive".into());
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.nx, self.grid.ny, self.grid.nz, self.grid.ly)
    }

    pub fn physics(&self) -> Result<Physics> {
        Physics::new(self.physics.nu, self.physics.beta, self.physics.m)
    }

    pub fn initial_spec(&self) -> InitialDataSpec {
        InitialDataSpec { seed: self.seed, ..self.initial }
    }

    /// Simulation settings for `physics`; `dt` is capped at `MAX_DT_BETA / beta`
    /// so sweeps over strong stratification share one config.
    pub fn simulation(&self, physics: Physics) -> SimulationConfig {
        let dt = if physics.beta > 0.0 { self.time.dt.min(MAX_DT_BETA / physics.beta) } else { self.time.dt };
        let mut s = SimulationConfig::new(physics, dt, self.time.t_end, self.time.checkpoint_every);
        s.verdict = self.verdict;
        s.horizon_cap = self.horizon_cap;
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_roundtrip() {
        for mode in [Mode::Linear, Mode::Dispersive, Mode::Dns, Mode::Threshold, Mode::VerifyMultipliers] {
            let c = ExperimentConfig::default_for(mode);
            c.validate().unwrap();
            let text = serde_json::to_string(&c).unwrap();
            assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
        }
    }

    #[test]
    fn errors_name_the_field() {
        let mut c = ExperimentConfig::default_for(Mode::Threshold);
        c.bisection.eps_lo = 2e4;
        match c.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "bisection"),
            other => panic!("{other:?}"),
        }
        let mut c = ExperimentConfig::default_for(Mode::Dns);
        c.physics.beta = 0.0;
        assert!(c.validate().is_err());
        c.physics.lift_up_regression = true;
        assert!(c.validate().is_ok());
        assert!(ExperimentConfig::from_json("{\"version\": 1}").is_err());
    }
}

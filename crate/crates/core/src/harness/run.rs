use super::bisection::{threshold_bisection, threshold_exponent, ThresholdResult};
use super::config::{ExperimentConfig, Mode};
use super::report::{fit_report, SeriesBundle};
use super::scan::multiplier_scan;
use crate::dispersive::{decay_fit, sup_decay_scan, Line, PhaseFunction};
use crate::error::{Error, Result};
use crate::linear_dynamics::{propagate_linear, LinearFields};
use crate::nonlinear_solver::{make_initial_data, simulate, FlowState, InitialDataSpec, Physics};
use crate::series::DiagnosticsSeries;
use crate::spectral_core::{Grid, SpectralField, WaveVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

/// Samples of the dispersive scans.
pub const DISPERSIVE_TIMES: (f64, f64, usize) = (1.0, 100.0, 40);
pub const RESONANT_TB: (f64, f64, usize) = (10.0, 1e4, 80);

/// Everything a run produces; the caller decides how to store it.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub mode: Mode,
    /// Named series, one CSV each.
    pub series: Vec<(String, DiagnosticsSeries)>,
    pub summary: Value,
    pub final_state: Option<FlowState>,
}

fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    match config.mode {
        Mode::Linear => run_linear(config),
        Mode::Dispersive => run_dispersive(config),
        Mode::Dns => run_dns(config),
        Mode::Threshold => run_threshold(config),
        Mode::VerifyMultipliers => run_verify_multipliers(config),
    }
}

fn nonzero_fields(state: &FlowState) -> LinearFields {
    let keep = |f: &SpectralField| f.map_symbol(|w: WaveVector| Complex64::new(if w.k != 0 { 1.0 } else { 0.0 }, 0.0));
    LinearFields { u1: keep(&state.u1), u3: keep(&state.u3), g: keep(&state.g), gamma: keep(&state.gamma) }
}

pub fn run_linear(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let grid = config.grid()?;
    let physics = config.physics()?;
    let data = make_initial_data(&config.initial_spec(), grid, physics.m)?;
    let fields = nonzero_fields(&data.state);
    let every = ((config.time.checkpoint_every / config.time.dt).round() as usize).max(1);
    let run = propagate_linear(&fields, physics.linear(), physics.m, config.time.t_end, config.time.dt, every, false)?;
    let fits = fit_report(SeriesBundle::Linear { series: &run.series, nu: physics.nu, beta: physics.beta });
    let summary = json!({
        "final_time": run.final_time,
        "dt_used": run.dt_used,
        "m3_aux_discrepancy": run.m3_aux_discrepancy,
        "initial_h_norm": data.h_norm,
        "initial_w_norm": data.w_norm,
        "fits": fits,
    });
    Ok(ExperimentOutput { mode: Mode::Linear, series: vec![("linear".into(), run.series)], summary, final_state: None })
}

pub fn run_dispersive(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let line = Line::dispersive_default();
    let h = line.sample(|y| (-y * y).exp());
    let (a, b, n) = DISPERSIVE_TIMES;
    let sup = sup_decay_scan(&h, &line, 1, config.physics.beta, &log_space(a, b, n), 0.0)?;
    let (ta, tb, tn) = RESONANT_TB;
    let fit = decay_fit(1, -1, PhaseFunction::degenerate_ratio(), ta, tb, tn)?;
    let mut band = DiagnosticsSeries::new(&["tb", "abs_integral"]);
    for &(t, v) in &fit.samples {
        band.push(vec![t, v])?;
    }
    let norm = sup.column("normalized")?;
    let bound = sup.column("bound")?.first().copied().unwrap_or(f64::NAN);
    let worst = norm.iter().copied().fold(0.0, f64::max);
    let fits = fit_report(SeriesBundle::Dispersive { series: &sup, resonant: Some(&fit) });
    let summary = json!({
        "max_normalized_sup": worst,
        "w21_bound": bound,
        "bounded_by_10x": worst <= 10.0 * bound,
        "resonant_window_start": fit.window_start,
        "fits": fits,
    });
    Ok(ExperimentOutput {
        mode: Mode::Dispersive,
        series: vec![("sup_decay".into(), sup), ("resonant_band".into(), band)],
        summary,
        final_state: None,
    })
}

pub fn run_dns(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    run_dns_from(config, None)
}

/// DNS starting from `start` (e.g. a saved checkpoint) instead of generated data.
/// The horizon is measured from `start.t`.
pub fn run_dns_from(config: &ExperimentConfig, start: Option<FlowState>) -> Result<ExperimentOutput> {
    let grid = config.grid()?;
    let physics = config.physics()?;
    let (initial, norms) = match start {
        Some(s) => {
            if s.grid() != grid {
                return Err(Error::Config {
                    field: "grid".into(),
                    message: "checkpoint grid differs from the configured grid".into(),
                });
            }
            (s, None)
        }
        None => {
            let data = make_initial_data(&config.initial_spec(), grid, physics.m)?;
            (data.state, Some((data.h_norm, data.w_norm)))
        }
    };
    let mut sim = config.simulation(physics);
    sim.track_duhamel = true;
    let r = simulate(&initial, &sim)?;
    let fits = fit_report(SeriesBundle::Dns { series: &r.series, nu: physics.nu, beta: physics.beta });
    let summary = json!({
        "verdict": r.verdict,
        "verdict_rule": r.rule,
        "invariants": r.invariants,
        "steps": r.steps,
        "dt_final": r.dt_final,
        "final_time": r.final_state.t,
        "initial_h_norm": norms.map(|n| n.0),
        "initial_w_norm": norms.map(|n| n.1),
        "fits": fits,
    });
    let mut duhamel = DiagnosticsSeries::new(&["t", "relative_error"]);
    for &(t, e) in &r.duhamel_error {
        duhamel.push(vec![t, e])?;
    }
    Ok(ExperimentOutput {
        mode: Mode::Dns,
        series: vec![("dns".into(), r.series), ("duhamel".into(), duhamel)],
        summary,
        final_state: Some(r.final_state),
    })
}

/// Verdict of one DNS at amplitude `eps`.
pub fn dns_verdict(config: &ExperimentConfig, grid: Grid, physics: Physics, eps: f64) -> Result<(bool, Option<f64>)> {
    let spec = InitialDataSpec { amplitude: eps, ..config.initial_spec() };
    let data = make_initial_data(&spec, grid, physics.m)?;
    let r = simulate(&data.state, &config.simulation(physics))?;
    Ok(match r.verdict {
        crate::nonlinear_solver::Verdict::Stable => (true, None),
        crate::nonlinear_solver::Verdict::Unstable { blowup_time, .. } => (false, blowup_time),
    })
}

/// Thresholds over the sweep grid `nus x betas`, in parallel.
pub fn threshold_sweep(config: &ExperimentConfig) -> Result<Vec<ThresholdResult>> {
    let grid = config.grid()?;
    let nus = if config.sweep.nus.is_empty() { vec![config.physics.nu] } else { config.sweep.nus.clone() };
    let betas = if config.sweep.betas.is_empty() { vec![config.physics.beta] } else { config.sweep.betas.clone() };
    let points: Vec<(f64, f64)> = betas.iter().flat_map(|&b| nus.iter().map(move |&n| (n, b))).collect();
    let b = config.bisection;
    points
        .par_iter()
        .map(|&(nu, beta)| {
            let physics = Physics::new(nu, beta, config.physics.m)?;
            threshold_bisection(nu, beta, b.eps_lo, b.eps_hi, b.max_iters, b.tol_rel, |eps| {
                dns_verdict(config, grid, physics, eps)
            })
        })
        .collect()
}

pub fn run_threshold(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let results = threshold_sweep(config)?;
    let mut table = DiagnosticsSeries::new(&["nu", "beta", "eps_star", "bracket_lo", "bracket_hi", "trials"]);
    for r in &results {
        table.push(vec![
            r.nu,
            r.beta,
            r.eps_star.unwrap_or(f64::NAN),
            r.bracket.0,
            r.bracket.1,
            r.trials.len() as f64,
        ])?;
    }
    let mut by_beta: Vec<f64> = results.iter().map(|r| r.beta).collect();
    by_beta.sort_by(f64::total_cmp);
    by_beta.dedup();
    let exponents: Vec<Value> = by_beta
        .iter()
        .map(|&beta| {
            let rs: Vec<ThresholdResult> = results.iter().filter(|r| r.beta == beta).cloned().collect();
            json!({ "beta": beta, "exponent": threshold_exponent(&rs) })
        })
        .collect();
    let summary = json!({
        "results": results,
        "nu_exponents": exponents,
        "verdict_rule": config.verdict,
        "note": "eps* ~ nu^p; desk-scale exponents are not expected to match 11/12 or 8/9",
    });
    Ok(ExperimentOutput {
        mode: Mode::Threshold,
        series: vec![("threshold".into(), table)],
        summary,
        final_state: None,
    })
}

pub fn run_verify_multipliers(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let beta = if config.physics.beta > 0.5 { config.physics.beta } else { 1.0 };
    let scan = multiplier_scan(config.scan_samples, config.seed, beta)?;
    let summary = json!({
        "scan": scan,
        "min_orr_margin_nonnegative": scan.min_orr_margin >= 0.0,
        "m_in_unit_interval": scan.out_of_range == 0,
        "paper_floor_holds": scan.below_paper_floor == 0,
        "infimum_holds": scan.below_infimum == 0,
    });
    Ok(ExperimentOutput {
        mode: Mode::VerifyMultipliers,
        series: vec![("multiplier_scan".into(), scan.series)],
        summary,
        final_state: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dns_with_zero_amplitude_is_all_zero() {
        let mut c = ExperimentConfig::default_for(Mode::Dns);
        c.grid = super::super::config::GridConfig { nx: 8, ny: 8, nz: 8, ly: 4.0 * std::f64::consts::PI };
        c.time.t_end = 1.0;
        c.initial.amplitude = 0.0;
        let out = run(&c).unwrap();
        let s = &out.series[0].1;
        assert!(s.rows.iter().all(|r| r[1..].iter().all(|v| v.is_nan() || *v == 0.0)));
        assert_eq!(out.summary["verdict"]["verdict"], "stable");
    }

    #[test]
    fn malformed_config_rejected() {
        let mut c = ExperimentConfig::default_for(Mode::Threshold);
        c.bisection.eps_hi = c.bisection.eps_lo / 2.0;
        assert!(run(&c).is_err());
    }
}

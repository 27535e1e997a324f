use crate::error::Result;
use serde::{Deserialize, Serialize};

/// Bracket expansions allowed per side before a sweep point is declared inconclusive.
pub const MAX_EXPANSIONS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub eps: f64,
    pub stable: bool,
    pub blowup_time: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BisectionStatus {
    Converged,
    MaxIters,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub nu: f64,
    pub beta: f64,
    /// Geometric midpoint of the final bracket; `None` when no bracket was found.
    pub eps_star: Option<f64>,
    pub bracket: (f64, f64),
    pub trials: Vec<Trial>,
    pub status: BisectionStatus,
    /// No stable trial lies above an unstable one by more than one tolerance band.
    pub monotone: bool,
}

impl ThresholdResult {
    pub fn is_conclusive(&self) -> bool {
        self.status != BisectionStatus::Inconclusive
    }
}

/// Log-space bisection for the largest stable amplitude.  `verdict(eps)`
/// returns whether the run at `eps` is stable and its blow-up time, if any.
pub fn threshold_bisection<F>(
    nu: f64,
    beta: f64,
    eps_lo: f64,
    eps_hi: f64,
    max_iters: u32,
    tol_rel: f64,
    mut verdict: F,
) -> Result<ThresholdResult>
where
    F: FnMut(f64) -> Result<(bool, Option<f64>)>,
{
    let mut trials = Vec::new();
    let mut run = |eps: f64, trials: &mut Vec<Trial>| -> Result<bool> {
        let (stable, blowup_time) = verdict(eps)?;
        trials.push(Trial { eps, stable, blowup_time });
        Ok(stable)
    };
    let (mut lo, mut hi) = (eps_lo, eps_hi);
    let mut lo_ok = run(lo, &mut trials)?;
    for _ in 0..MAX_EXPANSIONS {
        if lo_ok {
            break;
        }
        hi = lo;
        lo *= 0.5;
        lo_ok = run(lo, &mut trials)?;
    }
    let mut hi_bad = lo_ok && !run(hi, &mut trials)?;
    if lo_ok && !hi_bad {
        for _ in 0..MAX_EXPANSIONS {
            lo = hi;
            hi *= 2.0;
            hi_bad = !run(hi, &mut trials)?;
            if hi_bad {
                break;
            }
        }
    }
    let status = if !(lo_ok && hi_bad) {
        BisectionStatus::Inconclusive
    } else {
        let mut iters = 0;
        while hi / lo - 1.0 > tol_rel && iters < max_iters {
            let mid = (lo * hi).sqrt();
            if run(mid, &mut trials)? {
                lo = mid;
            } else {
                hi = mid;
            }
            iters += 1;
        }
        if hi / lo - 1.0 <= tol_rel {
            BisectionStatus::Converged
        } else {
            BisectionStatus::MaxIters
        }
    };
    let min_unstable = trials.iter().filter(|t| !t.stable).map(|t| t.eps).fold(f64::INFINITY, f64::min);
    let monotone = trials.iter().filter(|t| t.stable).all(|t| t.eps <= min_unstable * (1.0 + tol_rel));
    let eps_star = (status != BisectionStatus::Inconclusive).then(|| (lo * hi).sqrt());
    Ok(ThresholdResult { nu, beta, eps_star, bracket: (lo, hi), trials, status, monotone })
}

/// Least-squares slope of `log eps*` against `log nu` over conclusive results.
pub fn threshold_exponent(results: &[ThresholdResult]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = results.iter().filter_map(|r| r.eps_star.map(|e| (r.nu.ln(), e.ln()))).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(threshold: f64) -> impl FnMut(f64) -> Result<(bool, Option<f64>)> {
        move |e| Ok((e <= threshold, if e > threshold { Some(1.0) } else { None }))
    }

    #[test]
    fn finds_step_threshold() {
        let r = threshold_bisection(1e-2, 1.0, 1e-5, 1.0, 60, 1e-3, step(1e-3)).unwrap();
        assert_eq!(r.status, BisectionStatus::Converged);
        let e = r.eps_star.unwrap();
        assert!((e / 1e-3 - 1.0).abs() <= 1e-3, "{e}");
        assert!(r.monotone);
    }

    #[test]
    fn expands_bracket() {
        let r = threshold_bisection(1e-2, 1.0, 2e-3, 4e-3, 60, 1e-2, step(1e-3)).unwrap();
        assert!(r.is_conclusive());
        assert!((r.eps_star.unwrap() / 1e-3 - 1.0).abs() <= 1e-2);
        let r = threshold_bisection(1e-2, 1.0, 1e-6, 1e-5, 60, 1e-2, step(1e-3)).unwrap();
        assert_eq!(r.status, BisectionStatus::Inconclusive);
        assert!(r.eps_star.is_none());
    }

    #[test]
    fn exponent_of_power_law() {
        let mk = |nu: f64| ThresholdResult {
            nu,
            beta: 1.0,
            eps_star: Some(nu.powf(11.0 / 12.0)),
            bracket: (0.0, 0.0),
            trials: vec![],
            status: BisectionStatus::Converged,
            monotone: true,
        };
        let p = threshold_exponent(&[mk(1e-2), mk(1e-3), mk(1e-4)]).unwrap();
        assert!((p - 11.0 / 12.0).abs() < 1e-12);
    }
}

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitModel {
    /// `v ~ C e^{a t}`
    Exponential,
    /// `v ~ C t^a`
    Power,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub intercept: f64,
    /// RMS of the log-space residual.
    pub residual: f64,
    pub samples: usize,
}

pub const MIN_FIT_SAMPLES: usize = 10;

/// Least squares on `log v` against `t` or `log t`.
pub fn rate_fit(series: &[(f64, f64)], model: FitModel) -> Result<FitResult> {
    if series.len() < MIN_FIT_SAMPLES {
        return Err(Error::Domain(format!("rate fit needs {MIN_FIT_SAMPLES} samples, got {}", series.len())));
    }
    let mut xs = Vec::with_capacity(series.len());
    let mut ys = Vec::with_capacity(series.len());
    for &(t, v) in series {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("nonpositive value {v} at t = {t}")));
        }
        let x = match model {
            FitModel::Exponential => t,
            FitModel::Power => {
                if !(t > 0.0) {
                    return Err(Error::Domain(format!("power fit needs t > 0, got {t}")));
                }
                t.ln()
            }
        };
        xs.push(x);
        ys.push(v.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Domain("abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(FitResult { exponent: slope, intercept, residual: (ss / n).sqrt(), samples: xs.len() })
}

/// Drops the transient `t < t_min` and the last 10% of the time span.
pub fn fit_window(series: &[(f64, f64)], t_min: f64) -> Vec<(f64, f64)> {
    let Some(&(t_last, _)) = series.last() else { return Vec::new() };
    let t_first = series[0].0;
    let t_max = t_last - 0.1 * (t_last - t_first);
    series.iter().copied().filter(|&(t, _)| t >= t_min && t <= t_max).collect()
}

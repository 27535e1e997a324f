use crate::dispersive::DecayFit;
use crate::linear_dynamics::{fit_window, rate_fit, FitModel};
use crate::multipliers::lambda_beta;
use crate::series::DiagnosticsSeries;
use serde::{Deserialize, Serialize};

/// Fits start after this transient.
pub const FIT_T_MIN: f64 = 1.0;

#[derive(Clone, Copy, Debug)]
pub enum SeriesBundle<'a> {
    Linear { series: &'a DiagnosticsSeries, nu: f64, beta: f64 },
    Dns { series: &'a DiagnosticsSeries, nu: f64, beta: f64 },
    Dispersive { series: &'a DiagnosticsSeries, resonant: Option<&'a DecayFit> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub quantity: String,
    pub model: FitModel,
    pub fitted: Option<f64>,
    pub predicted: f64,
    pub samples: usize,
    pub residual: Option<f64>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub rows: Vec<FitRow>,
}

impl FitReport {
    pub fn get(&self, quantity: &str) -> Option<&FitRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    fn fit(&mut self, quantity: &str, model: FitModel, predicted: f64, pairs: Vec<(f64, f64)>, note: Option<&str>) {
        let window: Vec<(f64, f64)> =
            fit_window(&pairs, FIT_T_MIN).into_iter().filter(|(t, v)| t.is_finite() && v.is_finite()).collect();
        let samples = window.len();
        let (fitted, residual, skip) = match rate_fit(&window, model) {
            Ok(f) => (Some(f.exponent), Some(f.residual), None),
            Err(e) => (None, None, Some(format!("fit skipped: {e}"))),
        };
        let note = skip.or_else(|| note.map(str::to_string));
        self.rows.push(FitRow { quantity: quantity.into(), model, fitted, predicted, samples, residual, note });
    }
}

fn column_pairs(s: &DiagnosticsSeries, name: &str) -> Vec<(f64, f64)> {
    s.pairs(name).unwrap_or_default()
}

/// Fitted rates next to their predicted values.
pub fn fit_report(bundle: SeriesBundle<'_>) -> FitReport {
    let mut r = FitReport::default();
    match bundle {
        SeriesBundle::Linear { series, nu, beta } => {
            let rate = lambda_beta(beta).map(|l| -l * nu.cbrt()).unwrap_or(f64::NAN);
            let g = column_pairs(series, "g");
            let gam = column_pairs(series, "gamma");
            let both = g.iter().zip(&gam).map(|(a, b)| (a.0, a.1.hypot(b.1))).collect();
            r.fit(
                "enhanced_dissipation",
                FitModel::Exponential,
                rate,
                both,
                Some("predicted -lambda nu^{1/3} is a bound"),
            );
            r.fit("inviscid_damping_u2", FitModel::Power, -1.5, column_pairs(series, "u2"), None);
            let theta = column_pairs(series, "theta_damped")
                .into_iter()
                .map(|(t, v)| (t, v / (1.0 + t * t).sqrt().sqrt()))
                .collect();
            r.fit("inviscid_damping_theta", FitModel::Power, -0.5, theta, None);
        }
        SeriesBundle::Dns { series, nu, beta } => {
            let _ = nu;
            let note = if beta > 0.5 { Some("bounded weighted norm: exponent <= 0") } else { None };
            r.fit("weighted_g_nonzero", FitModel::Exponential, 0.0, column_pairs(series, "a_g_nonzero"), note);
            r.fit("weighted_gamma_nonzero", FitModel::Exponential, 0.0, column_pairs(series, "a_gamma_nonzero"), note);
            r.fit("dispersive_u2_0", FitModel::Power, -1.0 / 3.0, column_pairs(series, "u2_0_linf"), None);
        }
        SeriesBundle::Dispersive { series, resonant } => {
            r.fit("sup_decay", FitModel::Power, -1.0 / 3.0, column_pairs(series, "sup"), None);
            if let Some(d) = resonant {
                let row = match &d.asymptotic {
                    Some(f) => FitRow {
                        quantity: "resonant_band".into(),
                        model: FitModel::Power,
                        fitted: Some(f.exponent),
                        predicted: -1.0 / 3.0,
                        samples: f.samples,
                        residual: Some(f.residual),
                        note: Some(format!(
                            "window tb >= {:.0}; full-range fit {:.4}",
                            d.window_start, d.full.exponent
                        )),
                    },
                    None => FitRow {
                        quantity: "resonant_band".into(),
                        model: FitModel::Power,
                        fitted: None,
                        predicted: -1.0 / 3.0,
                        samples: 0,
                        residual: None,
                        note: Some("fit skipped: too few samples in the Airy window".into()),
                    },
                };
                r.rows.push(row);
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_exponential() {
        let mut s = DiagnosticsSeries::new(&["t", "g", "gamma", "u2", "theta_damped"]);
        for i in 0..200 {
            let t = i as f64 * 0.1;
            s.push(vec![t, (-0.1 * t).exp(), 0.0, (1.0 + t).powf(-1.5), 1.0]).unwrap();
        }
        let r = fit_report(SeriesBundle::Linear { series: &s, nu: 1e-3, beta: 1.0 });
        let ed = r.get("enhanced_dissipation").unwrap();
        assert!((ed.fitted.unwrap() + 0.1).abs() < 1e-6);
        assert!((ed.predicted + 0.1 / 3.0).abs() < 1e-12);
        assert!(r.get("inviscid_damping_theta").unwrap().fitted.is_some());
    }

    #[test]
    fn short_series_skipped_with_notice() {
        let mut s = DiagnosticsSeries::new(&["t", "sup"]);
        for i in 0..5 {
            s.push(vec![1.0 + i as f64, 1.0]).unwrap();
        }
        let r = fit_report(SeriesBundle::Dispersive { series: &s, resonant: None });
        let row = r.get("sup_decay").unwrap();
        assert!(row.fitted.is_none());
        assert!(row.note.as_ref().unwrap().contains("skipped"));
    }
}

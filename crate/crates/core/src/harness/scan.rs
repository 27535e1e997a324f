use crate::error::{Error, Result};
use crate::multipliers::{check_orr_inequality, kappa_floor_m3, log_weight, m3_infimum, Ghost, MultiplierParams};
use crate::series::DiagnosticsSeries;
use crate::spectral_core::WaveVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const SCAN_COLUMNS: [&str; 9] = ["k", "eta", "l", "t", "nu", "m1", "m2", "m3", "orr_margin"];
pub const SCAN_NUS: [f64; 3] = [1e-2, 1e-3, 1e-4];
/// Range of `|eta - tk|` and of `t` in the scan.
pub const SCAN_SHEAR_MAX: f64 = 1e3;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiplierScan {
    #[serde(skip)]
    pub series: DiagnosticsSeries,
    pub samples: usize,
    pub beta: f64,
    pub min_m: [f64; 3],
    pub max_m: [f64; 3],
    pub min_orr_margin: f64,
    /// `exp(-(sqrt(pi)/2) G(1/4)/G(3/4))`.
    pub paper_floor_m3: f64,
    /// `exp(-sqrt(pi) G(1/4)/G(3/4))`.
    pub infimum_m3: f64,
    pub below_paper_floor: usize,
    pub below_infimum: usize,
    /// Samples with some `M_j` outside `(0, 1]`.
    pub out_of_range: usize,
    pub orr_violations: usize,
}

/// Random scan over `k in [1,16]`, `|eta - tk| <= 1e3`, `l in [0,16]`,
/// `t in [0, 1e3]` and `nu` in [`SCAN_NUS`].
pub fn multiplier_scan(samples: usize, seed: u64, beta: f64) -> Result<MultiplierScan> {
    if samples == 0 {
        return Err(Error::Domain("scan needs at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(i64, f64, i64, f64, f64)> = (0..samples)
        .map(|_| {
            let k = rng.gen_range(1..=16i64);
            let s = rng.gen_range(-SCAN_SHEAR_MAX..=SCAN_SHEAR_MAX);
            let l = rng.gen_range(0..=16i64);
            let t = rng.gen_range(0.0..=SCAN_SHEAR_MAX);
            let nu = SCAN_NUS[rng.gen_range(0..SCAN_NUS.len())];
            (k, s + t * k as f64, l, t, nu)
        })
        .collect();
    let rows: Vec<Vec<f64>> = draws
        .par_iter()
        .map(|&(k, eta, l, t, nu)| {
            let p = MultiplierParams::new(nu, beta, 3, t)?;
            let w = WaveVector::new(k, eta, l);
            let m: Vec<f64> = Ghost::ALL.iter().map(|&j| log_weight(j, w, &p).map(f64::exp)).collect::<Result<_>>()?;
            Ok(vec![k as f64, eta, l as f64, t, nu, m[0], m[1], m[2], check_orr_inequality(w, &p)?])
        })
        .collect::<Result<_>>()?;
    let floor = kappa_floor_m3();
    let inf = m3_infimum();
    let mut out = MultiplierScan {
        series: DiagnosticsSeries::new(&SCAN_COLUMNS),
        samples,
        beta,
        min_m: [f64::INFINITY; 3],
        max_m: [f64::NEG_INFINITY; 3],
        min_orr_margin: f64::INFINITY,
        paper_floor_m3: floor,
        infimum_m3: inf,
        below_paper_floor: 0,
        below_infimum: 0,
        out_of_range: 0,
        orr_violations: 0,
    };
    for r in rows {
        for j in 0..3 {
            out.min_m[j] = out.min_m[j].min(r[5 + j]);
            out.max_m[j] = out.max_m[j].max(r[5 + j]);
        }
        if r[5..8].iter().any(|&m| !(m > 0.0 && m <= 1.0)) {
            out.out_of_range += 1;
        }
        if r[7] < floor - 1e-9 {
            out.below_paper_floor += 1;
        }
        if r[7] < inf - 1e-9 {
            out.below_infimum += 1;
        }
        if !(r[8] >= 0.0) {
            out.orr_violations += 1;
        }
        out.min_orr_margin = out.min_orr_margin.min(r[8]);
        out.series.push(r)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_scan_is_consistent() {
        let s = multiplier_scan(2000, 1, 1.0).unwrap();
        assert_eq!(s.series.len(), 2000);
        assert_eq!(s.out_of_range, 0);
        assert_eq!(s.orr_violations, 0);
        assert_eq!(s.below_infimum, 0);
        assert!(s.min_orr_margin >= 0.0);
        assert!(s.max_m.iter().all(|&m| m <= 1.0));
    }
}

use stratflow::dispersive::*;
use stratflow::Complex64 as C;

fn gaussian(line: &Line) -> Vec<C> {
    line.sample(|y| (-y * y).exp())
}

fn log_times(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

#[test]
fn gaussian_sup_decay_is_bounded() {
    let line = Line::dispersive_default();
    let h = gaussian(&line);
    let s = sup_decay_scan(&h, &line, 1, 1.0, &log_times(1.0, 100.0, 40), 0.0).unwrap();
    let norm = s.column("normalized").unwrap();
    let bound = s.column("bound").unwrap()[0];
    let worst = norm.iter().cloned().fold(0.0, f64::max);
    println!("max normalized {worst:.4}, |l| W21 {bound:.4}");
    assert!(worst <= 10.0 * bound);
}

#[test]
fn weighted_variant_decays_no_slower() {
    let line = Line::dispersive_default();
    let h = gaussian(&line);
    let times = log_times(1.0, 100.0, 12);
    let plain = sup_decay_scan(&h, &line, 2, 1.0, &times, 0.0).unwrap().column("sup").unwrap();
    let weighted = sup_decay_scan(&h, &line, 2, 1.0, &times, 1.0).unwrap().column("sup").unwrap();
    for (p, w) in plain.iter().zip(&weighted) {
        assert!(*w <= *p * (1.0 + 1e-12));
    }
}

#[test]
fn resonant_band_power() {
    let fit = decay_fit(1, -1, PhaseFunction::degenerate_ratio(), 10.0, 1e4, 80).unwrap();
    let asy = fit.asymptotic.unwrap();
    println!("full {:.4} asymptotic {:.4} from tb = {:.1}", fit.full.exponent, asy.exponent, fit.window_start);
    assert!((asy.exponent + 1.0 / 3.0).abs() < 0.05);
}

#[test]
fn high_band_power_and_prefactor() {
    let l = 1;
    let mut pref = Vec::new();
    for j in [1, 2, 3] {
        // stationary point in the plateau of the band; the quadratic regime
        // needs tb |Phi''| width^2 >> 1, i.e. tb >> xi
        let xi = 1.25 * 2f64.powi(j) / l as f64;
        let fit = decay_fit(l, j, PhaseFunction::stationary_ratio(xi), 200.0 * xi, 2e4 * xi, 30).unwrap();
        println!("j {j}: power {:.4}", fit.full.exponent);
        assert!((fit.full.exponent + 0.5).abs() < 0.05);
        pref.push(fit.full.intercept.exp() / 2f64.powf(1.5 * j as f64));
    }
    let spread = pref.iter().cloned().fold(0.0, f64::max) / pref.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("prefactor / 2^(3j/2): {pref:?}");
    assert!(spread < 1.5);
}

#[test]
fn low_band_bounds() {
    let l = 4;
    let j0 = resonant_band_start(l);
    for j in [-4, -2] {
        assert!((j as f64) < j0 - 1.0);
        for tb in [1.0, 10.0, 100.0, 1e3] {
            let (a, _) = oracle_support(l, j);
            let r = PhaseFunction::stationary_ratio(1.25 * a / 0.75);
            let i = stationary_phase_oracle(tb, l, j, r).unwrap().norm();
            let bound = (2f64.powi(j) / l as f64).min(tb.powf(-0.5));
            assert!(i <= 4.0 * bound, "j {j} tb {tb}: {i} vs {bound}");
        }
    }
}

#[test]
fn composite_bound_on_box() {
    use stratflow::spectral_core::{forward_transform, Grid};
    let g = Grid::new(2, 256, 8, 32.0 * std::f64::consts::PI).unwrap();
    let f = forward_transform(&g.sample(|_, y, z| (-y * y).exp() * (z.cos() + 0.5 * (2.0 * z).sin())), g).unwrap();
    let op = DispersiveOperator::new(1e-3, 1.0).unwrap();
    let s = composite_decay_scan(&f, &op, &log_times(1.0, 100.0, 15)).unwrap();
    let worst = s.column("normalized").unwrap().iter().cloned().fold(0.0, f64::max);
    let bound = s.column("bound").unwrap()[0];
    println!("composite max {worst:.4} vs W41 {bound:.4}");
    assert!(worst <= 10.0 * bound);
}

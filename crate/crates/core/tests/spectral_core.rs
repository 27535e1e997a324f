mod common;

use common::random_field;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stratflow::spectral_core::*;

fn grid() -> Grid {
    Grid::new(8, 8, 8, 3.0).unwrap()
}

fn field(seed: u64) -> SpectralField {
    random_field(grid(), &mut ChaCha8Rng::seed_from_u64(seed), false)
}

fn divergence(u: &[SpectralField; 3], t: f64) -> f64 {
    let g = u[0].grid;
    (0..g.len())
        .map(|i| {
            let w = g.wave_vector(i);
            (u[0].coeffs[i] * w.k as f64 + u[1].coeffs[i] * w.sheared_eta(t) + u[2].coeffs[i] * w.l as f64).norm()
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_roundtrip_and_parseval(seed in any::<u64>()) {
        let f = field(seed);
        let back = forward_transform(&inverse_transform(&f), f.grid).unwrap();
        prop_assert!(back.sub(&f).unwrap().max_abs() < 1e-13);
        let phys = inverse_transform(&f);
        let mean_sq = phys.iter().map(|v| v * v).sum::<f64>() / phys.len() as f64;
        prop_assert!((mean_sq.sqrt() - f.norm_l2()).abs() < 1e-12 * (1.0 + f.norm_l2()));
    }

    #[test]
    fn leray_is_an_orthogonal_projection(seeds in any::<[u64; 3]>(), t in 0.0f64..20.0) {
        let [a, b, c] = seeds.map(field);
        let p = leray_project([&a, &b, &c], t).unwrap();
        prop_assert!(divergence(&p, t) < 1e-12);
        let pp = leray_project([&p[0], &p[1], &p[2]], t).unwrap();
        for (x, y) in p.iter().zip(&pp) {
            prop_assert!(x.sub(y).unwrap().max_abs() < 1e-13);
        }
        let n_in: f64 = [&a, &b, &c].iter().map(|f| f.norm_l2().powi(2)).sum();
        let n_out: f64 = p.iter().map(|f| f.norm_l2().powi(2)).sum();
        prop_assert!(n_out <= n_in * (1.0 + 1e-12));
        for f in &p {
            prop_assert!(f.hermitian_defect() < 1e-14);
        }
    }

    #[test]
    fn mode_projections_partition(seed in any::<u64>()) {
        let f = field(seed);
        let parts: Vec<SpectralField> =
            [ModeClass::NonZero, ModeClass::SimpleZero, ModeClass::DoubleZero].iter().map(|&c| project_modes(&f, c)).collect();
        let sum = parts[0].add(&parts[1]).unwrap().add(&parts[2]).unwrap();
        prop_assert!(sum.sub(&f).unwrap().max_abs() == 0.0);
        for (i, p) in parts.iter().enumerate() {
            let class = [ModeClass::NonZero, ModeClass::SimpleZero, ModeClass::DoubleZero][i];
            prop_assert!(project_modes(p, class).sub(p).unwrap().max_abs() == 0.0);
            prop_assert!(p.hermitian_defect() < 1e-15);
        }
    }

    #[test]
    fn real_operators_keep_hermitian_symmetry(seeds in any::<[u64; 2]>(), t in 0.0f64..20.0, e in -2.0f64..2.0) {
        let [f, g] = seeds.map(field);
        for axis in [Axis::X, Axis::YL, Axis::Z] {
            prop_assert!(moving_derivative(&f, axis, t).unwrap().hermitian_defect() < 1e-12);
        }
        // negative powers are singular on the mean, so use the k != 0 part
        let fnz = project_modes(&f, ModeClass::NonZero);
        for s in [Symbol::GradL, Symbol::GradXZ, Symbol::Bracket] {
            prop_assert!(fractional_multiplier(&fnz, s, e, t).unwrap().hermitian_defect() < 1e-12);
        }
        prop_assert!(dealias_product(&f, &g).unwrap().hermitian_defect() < 1e-14);
    }

    #[test]
    fn sobolev_norms_increase_with_order(seed in any::<u64>(), s in 0.0f64..6.0) {
        let f = field(seed);
        let lo = sobolev_norm(&f, s).unwrap();
        let hi = sobolev_norm(&f, s + 1.0).unwrap();
        prop_assert!(lo <= hi);
        prop_assert!((sobolev_norm(&f, 0.0).unwrap() - f.norm_l2()).abs() < 1e-12);
    }
}

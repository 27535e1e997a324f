use super::field::SpectralField;
use super::ops::{fractional_multiplier, Symbol};
use super::transform::inverse_complex;
use crate::error::{Error, Result};

fn check_order(s: f64) -> Result<()> {
    if s.is_finite() && s >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Sobolev order {s} must be non-negative")))
    }
}

/// `(sum <k,eta,l>^{2s} |c|^2)^{1/2}`.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> Result<f64> {
    check_order(s)?;
    let g = f.grid;
    let sum: f64 =
        f.coeffs.iter().enumerate().map(|(i, c)| (1.0 + g.wave_vector(i).norm_sq()).powf(s) * c.norm_sqr()).sum();
    Ok(sum.sqrt())
}

/// Trapezoidal (collocation mean) L^1 norm of the physical field.
pub fn l1_norm(f: &SpectralField) -> f64 {
    let phys = inverse_complex(f);
    phys.iter().map(|c| c.norm()).sum::<f64>() / phys.len() as f64
}

pub fn linf_norm(f: &SpectralField) -> f64 {
    inverse_complex(f).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// L^1 norm of `<grad>^s f`.
pub fn w_s1_norm(f: &SpectralField, s: f64) -> Result<f64> {
    check_order(s)?;
    Ok(l1_norm(&fractional_multiplier(f, Symbol::Bracket, s, 0.0)?))
}

#[cfg(test)]
mod tests {
    use super::super::grid::Grid;
    use super::super::transform::forward_transform;
    use super::*;

    #[test]
    fn unit_constant() {
        let g = Grid::new(8, 8, 8, 2.0).unwrap();
        let one = forward_transform(&vec![1.0; g.len()], g).unwrap();
        for s in [0.0, 1.0, 3.5] {
            assert!((sobolev_norm(&one, s).unwrap() - 1.0).abs() < 1e-14);
            assert!((w_s1_norm(&one, s).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!(sobolev_norm(&one, -1.0).is_err());
    }

    #[test]
    fn cosine_h1_against_quadrature() {
        let g = Grid::new(16, 8, 8, 2.0).unwrap();
        let c = forward_transform(&g.sample(|x, _, _| x.cos()), g).unwrap();
        // mean(cos^2) + mean(sin^2) from the collocation sums
        let q: f64 = g.sample(|x, _, _| x.cos().powi(2) + x.sin().powi(2)).iter().sum::<f64>() / g.len() as f64;
        let h1 = sobolev_norm(&c, 1.0).unwrap();
        assert!((h1 * h1 - q).abs() < 1e-13);
        assert!((sobolev_norm(&c, 0.0).unwrap() - c.norm_l2()).abs() < 1e-14);
    }
}

use crate::error::{Error, Result};
use num_complex::Complex64;

type C = Complex64;

/// Linearised simple-zero system on the divergence-free subspace, in the
/// variables `(U^1, U^2, Theta)` with `U^3 = -eta U^2 / l`.
pub fn zero_mode_matrix(eta: f64, l: i64, nu: f64, beta: f64) -> [[f64; 3]; 3] {
    let q2 = eta * eta + (l * l) as f64;
    let d = -nu * q2;
    let a = if q2 > 0.0 { beta * (l * l) as f64 / q2 } else { 0.0 };
    [[d, -1.0, 0.0], [0.0, d, -a], [0.0, beta, d]]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroModeSpectrum {
    pub eta: f64,
    pub l: i64,
    pub matrix: [[f64; 3]; 3],
    /// Heat eigenvalue first, then the `+` and `-` dispersive branches.
    pub eigenvalues: [C; 3],
    /// `eigenvectors[j]` belongs to `eigenvalues[j]`.
    pub eigenvectors: [[C; 3]; 3],
    /// `|l| / |eta, l|`; the dispersion relation is `+- i` times this.
    pub dispersion: f64,
    /// Left eigenvector of the heat branch, `V = U^1 + Theta / beta`.
    pub passive_scalar: [f64; 3],
}

pub fn zero_mode_spectrum(eta: f64, l: i64, nu: f64, beta: f64) -> Result<ZeroModeSpectrum> {
    if l == 0 {
        return Err(Error::WrongSector("dispersive sector needs l != 0".into()));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta = {beta} must be positive")));
    }
    let q = (eta * eta + (l * l) as f64).sqrt();
    let disp = (l as f64).abs() / q;
    let omega = beta * disp;
    let heat = C::new(-nu * q * q, 0.0);
    let i = C::new(0.0, 1.0);
    let branch = |sign: f64| [i * (sign / omega), C::new(1.0, 0.0), -i * (sign * beta / omega)];
    Ok(ZeroModeSpectrum {
        eta,
        l,
        matrix: zero_mode_matrix(eta, l, nu, beta),
        eigenvalues: [heat, heat + i * omega, heat - i * omega],
        eigenvectors: [[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)], branch(1.0), branch(-1.0)],
        dispersion: disp,
        passive_scalar: [1.0, 0.0, 1.0 / beta],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let s = zero_mode_spectrum(0.0, 1, 0.1, 2.0).unwrap();
        assert!((s.eigenvalues[1] - C::new(-0.1, 2.0)).norm() < 1e-15);
        let s = zero_mode_spectrum(1.0, 1, 0.0, 1.0).unwrap();
        assert!((s.eigenvalues[2].im + 0.5f64.sqrt()).abs() < 1e-15);
        assert!(zero_mode_spectrum(1.0, 0, 0.1, 1.0).is_err());
    }

    #[test]
    fn eigenpairs_satisfy_matrix() {
        let s = zero_mode_spectrum(0.7, -3, 0.02, 1.4).unwrap();
        for (lam, v) in s.eigenvalues.iter().zip(&s.eigenvectors) {
            for r in 0..3 {
                let mv: C = (0..3).map(|c| v[c] * s.matrix[r][c]).sum();
                assert!((mv - v[r] * lam).norm() < 1e-13);
            }
        }
        // V annihilates the non-heat part: p^T (M - heat) = 0
        for c in 0..3 {
            let mut acc = 0.0;
            for r in 0..3 {
                acc += s.passive_scalar[r] * (s.matrix[r][c] - if r == c { s.eigenvalues[0].re } else { 0.0 });
            }
            assert!(acc.abs() < 1e-14);
        }
    }
}

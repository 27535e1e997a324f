use crate::error::{Error, Result};
use crate::spectral_core::{Grid, SpectralField, WaveVector};
use num_complex::Complex64;

type C = Complex64;

/// Largest axis length the brute-force oracles accept.
pub const ORACLE_MAX_N: usize = 16;

fn guard(g: &Grid) -> Result<()> {
    if g.nx.max(g.ny).max(g.nz) > ORACLE_MAX_N {
        return Err(Error::Oracle(format!("grid {}x{}x{} exceeds {ORACLE_MAX_N} per axis", g.nx, g.ny, g.nz)));
    }
    Ok(())
}

fn retained(g: &Grid) -> Vec<(i64, i64, i64, usize)> {
    (0..g.len())
        .filter(|&i| g.is_retained(i) && !g.is_nyquist(i))
        .map(|i| {
            let (ix, iy, iz) = g.unravel(i);
            (g.k_of(ix), g.n_of(iy), g.l_of(iz), i)
        })
        .collect()
}

/// Truncated spectral convolution `(f g)^` by a direct double loop over retained modes.
pub fn convolution_oracle(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.check_grid(g)?;
    let grid = f.grid;
    guard(&grid)?;
    let modes = retained(&grid);
    let mut out = SpectralField::zeros(grid);
    for &(k1, n1, l1, i1) in &modes {
        let a = f.coeffs[i1];
        if a == C::new(0.0, 0.0) {
            continue;
        }
        for &(k2, n2, l2, i2) in &modes {
            let (Some(ix), Some(iy), Some(iz)) =
                (Grid::slot(k1 + k2, grid.nx), Grid::slot(n1 + n2, grid.ny), Grid::slot(l1 + l2, grid.nz))
            else {
                continue;
            };
            let r = grid.index(ix, iy, iz);
            if grid.is_retained(r) && !grid.is_nyquist(r) {
                out.coeffs[r] += a * g.coeffs[i2];
            }
        }
    }
    Ok(out)
}

fn grad(w: WaveVector, t: f64) -> [f64; 3] {
    [w.k as f64, w.sheared_eta(t), w.l as f64]
}

/// `-(U . grad_L) F` by brute-force convolution.
pub fn transport_oracle(u: [&SpectralField; 3], f: &SpectralField, t: f64) -> Result<SpectralField> {
    let mut out = SpectralField::zeros(f.grid);
    for (a, ua) in u.iter().enumerate() {
        let d = f.map_symbol(|w: WaveVector| C::new(0.0, grad(w, t)[a]));
        out.axpy(-1.0, &convolution_oracle(ua, &d)?)?;
    }
    Ok(out)
}

/// `P(U,U)` from all nine products, by brute-force convolution.
pub fn pressure_oracle(u: [&SpectralField; 3], t: f64) -> Result<SpectralField> {
    let grid = u[0].grid;
    let mut out = SpectralField::zeros(grid);
    for a in 0..3 {
        for b in 0..3 {
            let p = convolution_oracle(u[a], u[b])?;
            let term = p.map_symbol(|w: WaveVector| {
                let q2 = w.sheared_norm_sq(t);
                if q2 == 0.0 {
                    C::new(0.0, 0.0)
                } else {
                    let v = grad(w, t);
                    C::new(v[a] * v[b] / q2, 0.0)
                }
            });
            out.axpy(1.0, &term)?;
        }
    }
    Ok(out)
}

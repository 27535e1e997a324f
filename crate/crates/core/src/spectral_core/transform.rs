use super::field::SpectralField;
use super::grid::Grid;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

type Plan = Arc<dyn Fft<f64>>;

fn plans() -> &'static RwLock<HashMap<(usize, bool), Plan>> {
    static PLANS: OnceLock<RwLock<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    PLANS.get_or_init(|| RwLock::new(HashMap::new()))
}

fn plan(n: usize, forward: bool) -> Plan {
    if let Some(p) = plans().read().expect("plan registry poisoned").get(&(n, forward)) {
        return p.clone();
    }
    let mut map = plans().write().expect("plan registry poisoned");
    map.entry((n, forward))
        .or_insert_with(|| {
            let dir = if forward { FftDirection::Forward } else { FftDirection::Inverse };
            FftPlanner::new().plan_fft(n, dir)
        })
        .clone()
}

/// In-place 3D FFT, unnormalised, over the (x, y, z) row-major layout.
pub(crate) fn fft3(data: &mut [Complex64], g: &Grid, forward: bool) {
    let (nx, ny, nz) = (g.nx, g.ny, g.nz);
    let pz = plan(nz, forward);
    data.par_chunks_mut(nz).for_each(|line| pz.process(line));

    let py = plan(ny, forward);
    data.par_chunks_mut(ny * nz).for_each(|slab| {
        let mut buf = vec![Complex64::new(0.0, 0.0); ny];
        for iz in 0..nz {
            for iy in 0..ny {
                buf[iy] = slab[iy * nz + iz];
            }
            py.process(&mut buf);
            for iy in 0..ny {
                slab[iy * nz + iz] = buf[iy];
            }
        }
    });

    let px = plan(nx, forward);
    let stride = ny * nz;
    let lines: Vec<Vec<Complex64>> = (0..stride)
        .into_par_iter()
        .map(|j| {
            let mut buf: Vec<Complex64> = (0..nx).map(|ix| data[ix * stride + j]).collect();
            px.process(&mut buf);
            buf
        })
        .collect();
    data.par_chunks_mut(stride).enumerate().for_each(|(ix, slab)| {
        for (j, v) in slab.iter_mut().enumerate() {
            *v = lines[j][ix];
        }
    });
}

pub fn forward_transform(physical: &[f64], grid: Grid) -> Result<SpectralField> {
    if physical.len() != grid.len() {
        return Err(Error::Dimension { expected: grid.len(), got: physical.len() });
    }
    let data: Vec<Complex64> = physical.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward_complex(data, grid)
}

/// Forward transform of a complex physical field (no Hermitian symmetry implied).
pub fn forward_complex(mut data: Vec<Complex64>, grid: Grid) -> Result<SpectralField> {
    if data.len() != grid.len() {
        return Err(Error::Dimension { expected: grid.len(), got: data.len() });
    }
    fft3(&mut data, &grid, true);
    let inv = 1.0 / grid.len() as f64;
    data.par_iter_mut().for_each(|c| *c *= inv);
    Ok(SpectralField { grid, coeffs: data })
}

pub fn inverse_complex(f: &SpectralField) -> Vec<Complex64> {
    let mut data = f.coeffs.clone();
    fft3(&mut data, &f.grid, false);
    data
}

/// Inverse transform keeping the real part.
pub fn inverse_transform(f: &SpectralField) -> Vec<f64> {
    inverse_complex(f).into_iter().map(|c| c.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_and_cosine() {
        let g = Grid::new(8, 8, 8, 3.0).unwrap();
        let one = forward_transform(&vec![1.0; g.len()], g).unwrap();
        for (i, c) in one.coeffs.iter().enumerate() {
            let expect = if i == 0 { 1.0 } else { 0.0 };
            assert!((c - Complex64::new(expect, 0.0)).norm() < 1e-15);
        }
        let cx = forward_transform(&g.sample(|x, _, _| x.cos()), g).unwrap();
        for (i, c) in cx.coeffs.iter().enumerate() {
            let w = g.wave_vector(i);
            let expect = if w.k.abs() == 1 && w.eta == 0.0 && w.l == 0 { 0.5 } else { 0.0 };
            assert!((c.re - expect).abs() < 1e-15 && c.im.abs() < 1e-15);
        }
    }

    #[test]
    fn roundtrip_and_parseval() {
        let g = Grid::new(8, 16, 6, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = forward_transform(&f, g).unwrap();
        let back = inverse_transform(&s);
        let scale = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        let err = f.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err / scale < 1e-12);
        let mean_sq = f.iter().map(|v| v * v).sum::<f64>() / g.len() as f64;
        assert!((s.norm_l2().powi(2) - mean_sq).abs() / mean_sq < 1e-12);
        assert!(s.hermitian_defect() < 1e-14);
    }

    #[test]
    fn shape_mismatch() {
        let g = Grid::new(4, 4, 4, 1.0).unwrap();
        assert!(matches!(forward_transform(&[0.0; 10], g), Err(Error::Dimension { .. })));
    }
}

use crate::error::{Error, Result};
use crate::spectral_core::WaveVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

/// Coefficients of the linearised sheared-frame system.
///
/// `lift_up` toggles the `-U^2` forcing of `U^1` together with its share of
/// the linear pressure; `orr_terms` toggles the `+-k s / (2 q^2)` terms that
/// the frame produces in the `G` and `Gamma` equations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearPhysics {
    pub nu: f64,
    pub beta: f64,
    pub lift_up: bool,
    pub orr_terms: bool,
}

impl LinearPhysics {
    pub fn new(nu: f64, beta: f64) -> Self {
        LinearPhysics { nu, beta, lift_up: true, orr_terms: true }
    }

    pub fn inviscid(self) -> Self {
        LinearPhysics { nu: 0.0, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearModeSystem {
    pub mode: WaveVector,
    /// `(U^1, U^3, G, Gamma)`.
    pub state: [C; 4],
    pub physics: LinearPhysics,
}

impl LinearModeSystem {
    /// `(U^2, Theta)` recovered from `(G, Gamma)`; zero on `k = l = 0`.
    pub fn primitive(&self, t: f64) -> (C, C) {
        recover(self.mode, self.state[2], self.state[3], t)
    }
}

pub(crate) fn recover(w: WaveVector, g: C, gamma: C, t: f64) -> (C, C) {
    let qxz = w.xz_norm();
    if qxz == 0.0 {
        return (C::new(0.0, 0.0), C::new(0.0, 0.0));
    }
    let q = w.sheared_norm_sq(t).sqrt();
    (-g * (qxz.sqrt() / q.powf(1.5)), gamma / (qxz * q).sqrt())
}

/// Non-viscous linear tendency of `(U^1, U^3, G, Gamma)` on any mode.
pub(crate) fn coupling_rhs(w: WaveVector, x: [C; 4], t: f64, p: &LinearPhysics) -> [C; 4] {
    let zero = C::new(0.0, 0.0);
    let qxz = w.xz_norm();
    if qxz == 0.0 {
        return [zero; 4];
    }
    let (k, l) = (w.k as f64, w.l as f64);
    let s = w.sheared_eta(t);
    let q2 = w.sheared_norm_sq(t);
    let q = q2.sqrt();
    let (u2, theta) = recover(w, x[2], x[3], t);
    let c_lu = if p.lift_up { 1.0 } else { 0.0 };
    let i = C::new(0.0, 1.0);
    let pressure = -i * ((1.0 + c_lu) * k / q2) * u2 - i * (p.beta * s / q2) * theta;
    let orr = if p.orr_terms { k * s / q2 } else { 0.0 };
    let skew = p.beta * qxz / q;
    [
        -u2 * c_lu + i * k * pressure,
        i * l * pressure,
        x[2] * ((c_lu - 0.5) * orr) + x[3] * skew,
        -x[3] * (0.5 * orr) - x[2] * skew,
    ]
}

/// Full linear tendency including `-nu |k, eta - tk, l|^2`.
pub fn linear_rhs(w: WaveVector, x: [C; 4], t: f64, p: &LinearPhysics) -> [C; 4] {
    let visc = -p.nu * w.sheared_norm_sq(t);
    let mut out = coupling_rhs(w, x, t, p);
    for (o, xi) in out.iter_mut().zip(x) {
        *o += xi * visc;
    }
    out
}

pub fn linear_rhs_nonzero(sys: &LinearModeSystem, t: f64) -> Result<[C; 4]> {
    if sys.mode.k == 0 {
        return Err(Error::WrongSector(format!("linear_rhs_nonzero needs k != 0, got mode {:?}", sys.mode)));
    }
    Ok(linear_rhs(sys.mode, sys.state, t, &sys.physics))
}

/// The 4x4 operator as `m[row][col]`.
pub fn linear_matrix(w: WaveVector, t: f64, p: &LinearPhysics) -> [[C; 4]; 4] {
    let mut m = [[C::new(0.0, 0.0); 4]; 4];
    for col in 0..4 {
        let mut e = [C::new(0.0, 0.0); 4];
        e[col] = C::new(1.0, 0.0);
        let r = linear_rhs(w, e, t, p);
        for row in 0..4 {
            m[row][col] = r[row];
        }
    }
    m
}


/// `int_a^b |k, eta - tau k, l|^2 dtau`, exact.
#[inline]
pub(crate) fn sheared_norm_integral(w: WaveVector, a: f64, b: f64) -> f64 {
    let (sa, sb) = (w.sheared_eta(a), w.sheared_eta(b));
    let kl = (w.k * w.k + w.l * w.l) as f64;
    (b - a) * (kl + (sa * sa + sa * sb + sb * sb) / 3.0)
}

/// One integrating-factor RK4 step for a single mode; viscosity is exact.
pub(crate) fn lawson_step(w: WaveVector, x: [C; 4], t: f64, h: f64, p: &LinearPhysics) -> [C; 4] {
    let tm = t + 0.5 * h;
    let e_half0 = (-p.nu * sheared_norm_integral(w, t, tm)).exp();
    let e_half1 = (-p.nu * sheared_norm_integral(w, tm, t + h)).exp();
    let e_full = e_half0 * e_half1;
    let comb = |a: [C; 4], sa: f64, b: [C; 4], sb: f64| {
        let mut o = [C::new(0.0, 0.0); 4];
        for i in 0..4 {
            o[i] = a[i] * sa + b[i] * sb;
        }
        o
    };
    let k1 = coupling_rhs(w, x, t, p);
    let xa = comb(x, e_half0, k1, 0.5 * h * e_half0);
    let k2 = coupling_rhs(w, xa, tm, p);
    let xb = comb(x, e_half0, k2, 0.5 * h);
    let k3 = coupling_rhs(w, xb, tm, p);
    let xc = comb(x, e_full, k3, h * e_half1);
    let k4 = coupling_rhs(w, xc, t + h, p);
    let mut out = [C::new(0.0, 0.0); 4];
    for i in 0..4 {
        out[i] = x[i] * e_full + (k1[i] * e_full + (k2[i] + k3[i]) * (2.0 * e_half1) + k4[i]) * (h / 6.0);
    }
    out
}

#[cfg(test)]
mod step_tests {
    use super::*;

    #[test]
    fn viscous_integral_matches_simpson() {
        let w = WaveVector::new(3, 1.5, -2);
        let (a, b) = (0.4, 1.9);
        let f = |tau: f64| w.sheared_norm_sq(tau);
        let simpson = (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
        assert!((sheared_norm_integral(w, a, b) - simpson).abs() < 1e-12);
    }

    #[test]
    fn pure_heat_is_exact() {
        let p = LinearPhysics { nu: 0.05, beta: 0.0, lift_up: false, orr_terms: false };
        let w = WaveVector::new(0, 1.0, 0);
        let x = [C::new(1.0, 0.0), C::new(0.5, 0.5), C::new(0.0, 0.0), C::new(0.0, 0.0)];
        let y = lawson_step(w, x, 0.0, 0.3, &p);
        let f = (-0.05f64 * 1.0 * 0.3).exp();
        assert!((y[0] - x[0] * f).norm() < 1e-15 && (y[1] - x[1] * f).norm() < 1e-15);
    }

    #[test]
    fn matrix_matches_propagator_jacobian() {
        let p = LinearPhysics::new(3e-3, 1.2);
        for (w, t) in
            [(WaveVector::new(1, 0.4, 2), 0.7), (WaveVector::new(-3, 2.5, -1), 4.1), (WaveVector::new(2, -1.0, 0), 0.0)]
        {
            let m = linear_matrix(w, t, &p);
            let d = |h: f64, col: usize| {
                let mut e = [C::new(0.0, 0.0); 4];
                e[col] = C::new(1.0, 0.0);
                let (a, b) = (lawson_step(w, e, t, h, &p), lawson_step(w, e, t, -h, &p));
                std::array::from_fn::<C, 4, _>(|i| (a[i] - b[i]) / (2.0 * h))
            };
            for col in 0..4 {
                let (d1, d2) = (d(1e-3, col), d(5e-4, col));
                for (row, m_row) in m.iter().enumerate() {
                    let rich = (d2[row] * 4.0 - d1[row]) / 3.0;
                    assert!((rich - m_row[col]).norm() < 1e-8, "{w:?} t={t} ({row},{col})");
                }
            }
        }
    }
}

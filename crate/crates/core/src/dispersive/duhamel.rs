use super::semigroup::{project_simple_zero, DispersiveOperator};
use crate::error::{Error, Result};
use crate::spectral_core::{SpectralField, WaveVector};
use num_complex::Complex64;

type C = Complex64;

/// `U - i |d_z| |grad_{y,z}|^{-1} V` on the simple-zero sector.
///
/// With `(U, V) = (U^2_0, Theta~_0)` this is `Upsilon`, which solves
/// `d_t Upsilon = L Upsilon + N`; with the two nonlinear tendencies it is `N`.
pub fn upsilon(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.check_grid(v)?;
    let rv = v.map_symbol(|w: WaveVector| C::new(0.0, -DispersiveOperator::dispersion(w.eta, w.l)));
    Ok(project_simple_zero(&u.add(&rv)?))
}

/// Same combination applied to the tendencies `(N_1, N_2)`.
pub fn upsilon_forcing(n1: &SpectralField, n2: &SpectralField) -> Result<SpectralField> {
    upsilon(n1, n2)
}

/// Streaming form of the split: `Upsilon_nl` advanced by the trapezoidal rule
/// `Y(t+dt) = e^{dt L} Y(t) + dt/2 (e^{dt L} N(t) + N(t+dt))`.
#[derive(Clone, Debug)]
pub struct DuhamelAccumulator {
    op: DispersiveOperator,
    upsilon0: SpectralField,
    nl: SpectralField,
    last: SpectralField,
    t: f64,
}

impl DuhamelAccumulator {
    pub fn new(op: DispersiveOperator, upsilon0: SpectralField, forcing0: SpectralField) -> Result<Self> {
        upsilon0.check_grid(&forcing0)?;
        let nl = SpectralField::zeros(upsilon0.grid);
        Ok(DuhamelAccumulator {
            op,
            upsilon0: project_simple_zero(&upsilon0),
            nl,
            last: project_simple_zero(&forcing0),
            t: 0.0,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn advance(&mut self, t_next: f64, forcing: SpectralField) -> Result<()> {
        let dt = t_next - self.t;
        if !(dt > 0.0) {
            return Err(Error::Domain(format!("Duhamel times must increase: {} -> {t_next}", self.t)));
        }
        self.nl.check_grid(&forcing)?;
        let forcing = project_simple_zero(&forcing);
        let mut next = self.op.apply_unchecked(&self.nl.add(&self.last.scale(0.5 * dt))?, dt);
        next.axpy(0.5 * dt, &forcing)?;
        self.nl = next;
        self.last = forcing;
        self.t = t_next;
        Ok(())
    }

    /// `Re e^{tL} Upsilon(0)`.
    pub fn u2_in(&self) -> SpectralField {
        self.op.apply_unchecked(&self.upsilon0, self.t).real_part()
    }

    pub fn u2_nl(&self) -> SpectralField {
        self.nl.real_part()
    }

    pub fn upsilon_nl(&self) -> &SpectralField {
        &self.nl
    }
}

#[derive(Clone, Debug)]
pub struct DuhamelSplit {
    pub times: Vec<f64>,
    pub u2_in: Vec<SpectralField>,
    pub u2_nl: Vec<SpectralField>,
}

impl DuhamelSplit {
    /// `||U2_in + U2_nl - U^2_0|| / ||U^2_0||` per sample (absolute where `U^2_0 = 0`).
    pub fn reconstruction_error(&self, u2: &[SpectralField]) -> Result<Vec<f64>> {
        if u2.len() != self.times.len() {
            return Err(Error::Dimension { expected: self.times.len(), got: u2.len() });
        }
        let mut out = Vec::with_capacity(u2.len());
        for ((a, b), u) in self.u2_in.iter().zip(&self.u2_nl).zip(u2) {
            let u = project_simple_zero(u);
            let r = a.add(b)?.sub(&u)?.norm_l2();
            let n = u.norm_l2();
            out.push(if n > 0.0 { r / n } else { r });
        }
        Ok(out)
    }
}

/// Splits `U^2_0` into the linear evolution of its data and the Duhamel
/// integral of `N`, sampled at the times of `forcing` (the first must be 0).
pub fn duhamel_decompose(
    upsilon0: &SpectralField,
    forcing: &[(f64, SpectralField)],
    op: &DispersiveOperator,
) -> Result<DuhamelSplit> {
    let Some((t0, f0)) = forcing.first() else {
        return Err(Error::Domain("no nonlinearity samples".into()));
    };
    if *t0 != 0.0 {
        return Err(Error::Domain(format!("samples must start at t = 0, got {t0}")));
    }
    let mut acc = DuhamelAccumulator::new(*op, upsilon0.clone(), f0.clone())?;
    let mut split = DuhamelSplit { times: vec![0.0], u2_in: vec![acc.u2_in()], u2_nl: vec![acc.u2_nl()] };
    for (t, f) in &forcing[1..] {
        acc.advance(*t, f.clone())?;
        split.times.push(*t);
        split.u2_in.push(acc.u2_in());
        split.u2_nl.push(acc.u2_nl());
    }
    Ok(split)
}

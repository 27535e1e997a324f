//! Binary checkpoint: magic, little-endian `u32` header length, JSON header,
//! then the five evolved fields as interleaved little-endian `f64` pairs.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use stratflow::nonlinear_solver::FlowState;
use stratflow::spectral_core::{Grid, SpectralField};
use stratflow::Complex64;

pub const MAGIC: &[u8; 8] = b"STRATCKP";
pub const FORMAT_VERSION: u32 = 1;
pub const FIELD_ORDER: [&str; 5] = ["u1", "u3", "g", "gamma", "theta_bar0"];

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format_version: u32,
    grid: Grid,
    t: f64,
    fields: Vec<String>,
    layout: String,
}

pub fn write_checkpoint<W: Write>(mut w: W, state: &FlowState) -> Result<()> {
    let header = Header {
        format_version: FORMAT_VERSION,
        grid: state.grid(),
        t: state.t,
        fields: FIELD_ORDER.iter().map(|s| s.to_string()).collect(),
        layout: "index (ix*ny + iy)*nz + iz; re, im per coefficient".into(),
    };
    let text = serde_json::to_vec(&header)?;
    w.write_all(MAGIC)?;
    w.write_all(&(text.len() as u32).to_le_bytes())?;
    w.write_all(&text)?;
    for f in state.fields() {
        for c in &f.coeffs {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<FlowState> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).context("reading magic")?;
    if &magic != MAGIC {
        bail!("not a checkpoint file");
    }
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let mut text = vec![0u8; u32::from_le_bytes(len) as usize];
    r.read_exact(&mut text)?;
    let header: Header = serde_json::from_slice(&text).context("checkpoint header")?;
    if header.format_version != FORMAT_VERSION {
        bail!("unsupported checkpoint version {}", header.format_version);
    }
    if header.fields != FIELD_ORDER {
        bail!("unexpected field list {:?}", header.fields);
    }
    let grid = header.grid;
    let mut state = FlowState::zeros(grid, header.t);
    let mut buf = [0u8; 8];
    for f in state.fields_mut() {
        let mut coeffs = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf);
            r.read_exact(&mut buf)?;
            coeffs.push(Complex64::new(re, f64::from_le_bytes(buf)));
        }
        *f = SpectralField::from_coeffs(grid, coeffs)?;
    }
    Ok(state)
}

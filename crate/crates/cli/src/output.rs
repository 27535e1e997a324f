use anyhow::{Context, Result};
use serde::Serialize;
use std::fs;
use std::path::Path;
use stratflow::DiagnosticsSeries;

/// Header row, then one record per row; values use the shortest decimal form
/// that round-trips, with `NaN` for undefined entries.
pub fn write_csv(path: &Path, series: &DiagnosticsSeries) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(&series.columns)?;
    for row in &series.rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

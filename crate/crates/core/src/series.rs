use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Column-named time series, one row per sample.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSeries {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl DiagnosticsSeries {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        DiagnosticsSeries { columns: columns.iter().map(|c| c.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Dimension { expected: self.columns.len(), got: row.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns.iter().position(|c| c == name).ok_or_else(|| Error::Domain(format!("no column named `{name}`")))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }

    /// `(t, value)` pairs, taking time from the first column.
    pub fn pairs(&self, name: &str) -> Result<Vec<(f64, f64)>> {
        let j = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| (r[0], r[j])).collect())
    }
}

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::cell::Cell;
use super::spec::SweepSpec;
use super::SweepError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
    /// SHA-256 of the sweep spec's JSON encoding.
    pub spec_hash: String,
    /// Every non-swept parameter, defaults included.
    pub parameters: BTreeMap<String, f64>,
}

impl Provenance {
    pub fn new(spec: &SweepSpec, parameters: BTreeMap<String, f64>) -> Result<Self, SweepError> {
        let encoded = serde_json::to_vec(spec)?;
        Ok(Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            spec_hash: hex::encode(Sha256::digest(&encoded)),
            parameters,
        })
    }
}

/// A finished sweep: one row per grid point, axis values first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub spec: SweepSpec,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub provenance: Provenance,
}

impl GridResult {
    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let line = |fields: Vec<String>| {
            fields
                .into_iter()
                .map(|f| {
                    if f.contains([',', '"', '\n']) {
                        format!("\"{}\"", f.replace('"', "\"\""))
                    } else {
                        f
                    }
                })
                .collect::<Vec<_>>()
                .join(",")
        };
        out.push_str(&line(self.columns.clone()));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row.iter().map(Cell::to_csv).collect()));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String, SweepError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, SweepError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl ExportFormat {
    /// From a file extension; CSV unless it is `.json`.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ExportFormat::Json,
            _ => ExportFormat::Csv,
        }
    }
}

pub fn export_table(result: &GridResult, format: ExportFormat, destination: &Path) -> Result<(), SweepError> {
    let text = match format {
        ExportFormat::Csv => result.to_csv(),
        ExportFormat::Json => result.to_json()?,
    };
    let io = |source| SweepError::Io {
        path: destination.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(destination).map_err(io)?);
    w.write_all(text.as_bytes()).map_err(io)?;
    w.flush().map_err(io)
}

pub fn read_json(path: &Path) -> Result<GridResult, SweepError> {
    let text = std::fs::read_to_string(path).map_err(|source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    GridResult::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{run_sweep, Axis};

    fn sample() -> GridResult {
        let spec = SweepSpec::new(vec![Axis::linear("mu", -3.0, 3.0, 7)])
            .fix("lambda", 0.0)
            .quantities(&["phase", "omega", "var_p", "x_scaled"]);
        run_sweep(&spec).unwrap()
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "mu,phase,omega,var_p,x_scaled");
        assert_eq!(lines.len(), 8);
        assert!(lines[1].starts_with("-3.0000000000000000e0,SXPa,"));
        assert!(lines[1].contains(",inf,"));
    }

    #[test]
    fn empty_quantities_give_header_only() {
        let spec = SweepSpec::new(vec![Axis::linear("xi", 0.0, 1.0, 3)]);
        let r = run_sweep(&spec).unwrap();
        assert_eq!(r.to_csv().lines().next(), Some("xi"));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let r = sample();
        let back = GridResult::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        for (a, b) in back.rows.iter().flatten().zip(r.rows.iter().flatten()) {
            if let (Cell::Num(x), Cell::Num(y)) = (a, b) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn io_errors_carry_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("missing").join("out.csv");
        let err = export_table(&sample(), ExportFormat::Csv, &target).unwrap_err();
        assert!(err.to_string().contains("missing"));
        let file = dir.path().join("out.json");
        export_table(&sample(), ExportFormat::from_path(&file), &file).unwrap();
        assert_eq!(read_json(&file).unwrap().rows, sample().rows);
    }

    #[test]
    fn hash_ignores_time() {
        let a = sample();
        let b = sample();
        assert_eq!(a.provenance.spec_hash, b.provenance.spec_hash);
        assert_eq!(a.to_csv(), b.to_csv());
    }
}

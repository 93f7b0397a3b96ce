use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// A header and rows; rendered as CSV or as a JSON array of objects.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// 17 significant digits, comma separated, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match c {
                    Cell::Num(v) => write!(out, "{v:.16e}").unwrap(),
                    Cell::Int(v) => write!(out, "{v}").unwrap(),
                    Cell::Text(s) => out.push_str(s),
                    Cell::Empty => {}
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| {
                        let v = match c {
                            Cell::Num(v) => serde_json::json!(v),
                            Cell::Int(v) => serde_json::json!(v),
                            Cell::Text(s) => serde_json::json!(s),
                            Cell::Empty => serde_json::Value::Null,
                        };
                        (k.to_string(), v)
                    })
                    .collect::<serde_json::Map<_, _>>();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

/// Collects result files for one run and writes them with a manifest.
pub struct Sink {
    dir: PathBuf,
    format: Format,
    written: Vec<String>,
}

impl Sink {
    pub fn new(dir: &Path, format: Format) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("--out {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), format, written: Vec::new() })
    }

    fn write(&mut self, name: String, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(&name);
        std::fs::write(&path, body).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        self.written.push(name);
        Ok(())
    }

    /// Writes `stem.csv` or `stem.json` according to the chosen format.
    pub fn table(&mut self, stem: &str, t: &Table) -> Result<(), CliError> {
        match self.format {
            Format::Csv => self.write(format!("{stem}.csv"), &t.to_csv()),
            Format::Json => self.write(format!("{stem}.json"), &pretty(&t.to_json())),
        }
    }

    /// Writes `stem.json` regardless of the format.
    pub fn json<T: Serialize>(&mut self, stem: &str, value: &T) -> Result<(), CliError> {
        let v = serde_json::to_value(value).map_err(|e| CliError::Numeric(format!("serializing {stem}: {e}")))?;
        self.write(format!("{stem}.json"), &pretty(&v))
    }

    pub fn manifest(mut self, command: &str, config_hash: String, seed: u64, wall_time_s: f64) -> Result<(), CliError> {
        let m = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            core_version: monodromy_core::VERSION,
            config_sha256: config_hash,
            seed,
            format: self.format,
            outputs: std::mem::take(&mut self.written),
            wall_time_s,
        };
        let v = serde_json::to_value(&m).expect("manifest serializes");
        self.write("manifest.json".into(), &pretty(&v))
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    core_version: &'a str,
    config_sha256: String,
    seed: u64,
    format: Format,
    outputs: Vec<String>,
    wall_time_s: f64,
}

/// SHA-256 of the effective configuration and any input files, hex encoded.
pub fn config_hash(config: &impl Serialize, inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(config).expect("configs serialize"));
    for i in inputs {
        h.update(i);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b", "c", "d"]);
        t.push(vec![0.1.into(), 3i64.into(), "x".into(), Cell::Empty]);
        assert_eq!(t.to_csv(), "a,b,c,d\n1.0000000000000001e-1,3,x,\n");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        let v = std::f64::consts::PI / 7.0;
        let s = format!("{v:.16e}");
        assert_eq!(s.parse::<f64>().unwrap(), v);
    }

    #[test]
    fn hash_depends_on_inputs() {
        let a = config_hash(&1u8, &[b"x"]);
        assert_eq!(a.len(), 64);
        assert_ne!(a, config_hash(&1u8, &[b"y"]));
    }
}

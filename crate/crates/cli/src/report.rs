//! Run manifests and tabular output in CSV or JSON.
//!
//! CSV output starts with `#` comment lines carrying the manifest, then a
//! header row and one record per row, LF-terminated. JSON output is a single
//! object `{"manifest": {...}, "summary": {...}, "columns": [...], "rows": [...]}`
//! where each row is an object keyed by column name in column order.

use std::fmt;

use clap::ValueEnum;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::format::{fmt_g, rounded};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Provenance of one run: what was read and how it was configured.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: &'static str,
    pub version: &'static str,
    pub input: String,
    /// Lowercase hex SHA-256 of the input bytes.
    pub sha256: String,
    /// `--set` overrides in command-line order.
    pub overrides: Vec<(String, f64)>,
    /// Command-specific settings in a fixed order.
    pub settings: Vec<(&'static str, String)>,
}

impl RunManifest {
    pub fn new(command: &'static str, input: &str, bytes: &[u8]) -> Self {
        RunManifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            input: input.to_string(),
            sha256: sha256_hex(bytes),
            overrides: Vec::new(),
            settings: Vec::new(),
        }
    }

    pub fn setting(&mut self, key: &'static str, value: impl fmt::Display) {
        self.settings.push((key, value.to_string()));
    }

    fn lines(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("command".to_string(), self.command.to_string()),
            ("version".to_string(), self.version.to_string()),
            ("input".to_string(), self.input.clone()),
            ("sha256".to_string(), self.sha256.clone()),
        ];
        for (name, value) in &self.overrides {
            out.push(("set".to_string(), format!("{name}={}", fmt_g(*value))));
        }
        for (k, v) in &self.settings {
            out.push((k.to_string(), v.clone()));
        }
        out
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), self.command.into());
        m.insert("version".into(), self.version.into());
        m.insert("input".into(), self.input.clone().into());
        m.insert("sha256".into(), self.sha256.clone().into());
        let overrides: Map<String, Value> = self
            .overrides
            .iter()
            .map(|(k, v)| (k.clone(), number(*v)))
            .collect();
        m.insert("overrides".into(), Value::Object(overrides));
        for (k, v) in &self.settings {
            m.insert(k.to_string(), v.clone().into());
        }
        Value::Object(m)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_g(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => number(*x),
            Cell::Int(n) => (*n).into(),
            Cell::Text(s) => s.clone().into(),
            Cell::Bool(b) => (*b).into(),
        }
    }
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(rounded(x))
        .map(Value::Number)
        .unwrap_or_else(|| fmt_g(x).into())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub manifest: RunManifest,
    /// Run-level scalars such as the maximum mass defect.
    pub summary: Vec<(&'static str, f64)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(manifest: RunManifest, columns: Vec<String>) -> Self {
        Report {
            manifest,
            summary: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn render(&self, format: OutputFormat) -> Result<Vec<u8>, CliError> {
        match format {
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut out = Vec::new();
        out.extend_from_slice(b"# depmark run manifest\n");
        for (k, v) in self.manifest.lines() {
            out.extend_from_slice(format!("# {k}: {v}\n").as_bytes());
        }
        for (k, v) in &self.summary {
            out.extend_from_slice(format!("# {k}: {}\n", fmt_g(*v)).as_bytes());
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }

    fn render_json(&self) -> Result<Vec<u8>, CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::json))
                        .collect(),
                )
            })
            .collect();
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.to_string(), number(*v)))
            .collect();
        let mut doc = Map::new();
        doc.insert("manifest".into(), self.manifest.to_json());
        doc.insert("summary".into(), Value::Object(summary));
        doc.insert("columns".into(), self.columns.clone().into());
        doc.insert("rows".into(), Value::Array(rows));
        let mut out = serde_json::to_vec_pretty(&Value::Object(doc))
            .map_err(|e| CliError::Output(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut m = RunManifest::new("solve", "m.mdl", b"abc");
        m.overrides.push(("C".into(), 0.999));
        m.setting("method", "expm");
        let mut r = Report::new(m, vec!["t".into(), "label".into(), "n".into(), "ok".into()]);
        r.summary.push(("max_mass_defect", 2.64e-6));
        r.rows.push(vec![
            Cell::Num(1.0 / 3.0),
            Cell::Text("a,b".into()),
            Cell::Int(7),
            Cell::Bool(true),
        ]);
        r
    }

    #[test]
    fn digest_of_known_input() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn csv_layout() {
        let text = String::from_utf8(sample().render(OutputFormat::Csv).unwrap()).unwrap();
        let expected = "# depmark run manifest\n\
# command: solve\n\
# version: 0.1.0\n\
# input: m.mdl\n\
# sha256: ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad\n\
# set: C=0.999\n\
# method: expm\n\
# max_mass_defect: 2.64e-06\n\
t,label,n,ok\n\
0.333333333,\"a,b\",7,true\n";
        assert_eq!(text.replace(env!("CARGO_PKG_VERSION"), "0.1.0"), expected);
    }

    #[test]
    fn json_mirrors_columns() {
        let bytes = sample().render(OutputFormat::Json).unwrap();
        let v: Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(v["manifest"]["overrides"]["C"], 0.999);
        assert_eq!(v["summary"]["max_mass_defect"], 2.64e-6);
        let row = v["rows"][0].as_object().unwrap();
        let keys: Vec<&String> = row.keys().collect();
        assert_eq!(keys, ["t", "label", "n", "ok"]);
        assert_eq!(row["t"], 0.333333333);
        assert_eq!(row["ok"], true);
    }
}

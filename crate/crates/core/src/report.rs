//! Run manifests and deterministic JSON/CSV emission.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    /// SHA-256 of the canonical JSON of the run configuration.
    pub config_hash: String,
    pub precision_bits: u32,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(
        command_line: Vec<String>,
        config: &Value,
        precision_bits: u32,
        seed: Option<u64>,
        timestamp: String,
    ) -> Self {
        RunManifest {
            command_line,
            config_hash: config_hash(config),
            precision_bits,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
        }
    }
}

/// serde_json maps are ordered by key, so `to_string` is canonical.
pub fn config_hash(config: &Value) -> String {
    hex::encode(Sha256::digest(config.to_string().as_bytes()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parse(format!("unknown format {s:?} (expected json or csv)"))),
        }
    }
}

/// Anything that can be emitted. Point sets provide CSV rows
/// `index,re,im,residual`.
pub trait Emit {
    fn to_json(&self) -> Value;
    fn csv_rows(&self) -> Option<Vec<[String; 4]>> {
        None
    }
}

impl Emit for Value {
    fn to_json(&self) -> Value {
        self.clone()
    }
}

pub fn emit_report(report: &dyn Emit, manifest: &RunManifest, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let doc = json!({ "manifest": manifest, "report": report.to_json() });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let rows = report
                .csv_rows()
                .ok_or_else(|| Error::Unsupported("this report has no point set; use json".into()))?;
            emit_csv(&rows, manifest)
        }
    }
}

/// Manifest as `#` comment lines, then the table.
pub fn emit_csv(rows: &[[String; 4]], manifest: &RunManifest) -> Result<String> {
    let mut out = String::new();
    let m = serde_json::to_value(manifest).map_err(|e| Error::Parse(e.to_string()))?;
    if let Value::Object(map) = m {
        for (k, v) in map {
            out.push_str(&format!("# {k}: {v}\n"));
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["index", "re", "im", "residual"]).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))?);
    Ok(out)
}

impl Emit for crate::relations::RelationReport {
    fn to_json(&self) -> Value {
        self.to_json()
    }
}

impl Emit for crate::monodromy::MonodromyReport {
    fn to_json(&self) -> Value {
        self.to_json()
    }
}

impl Emit for crate::equilibria::EquilibriumResult {
    fn to_json(&self) -> Value {
        self.to_json()
    }
    fn csv_rows(&self) -> Option<Vec<[String; 4]>> {
        Some(self.csv_rows())
    }
}

/// A multistart batch: JSON array of runs; CSV rows of every run, indexed
/// `run:point`.
pub struct EquilibriumBatch(pub Vec<crate::equilibria::EquilibriumResult>);

impl Emit for EquilibriumBatch {
    fn to_json(&self) -> Value {
        json!({
            "runs": self.0.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            "converged": self.0.iter().filter(|r| r.converged).count(),
        })
    }
    fn csv_rows(&self) -> Option<Vec<[String; 4]>> {
        Some(
            self.0
                .iter()
                .enumerate()
                .flat_map(|(run, r)| {
                    r.csv_rows()
                        .into_iter()
                        .map(move |[i, re, im, res]| [format!("{run}:{i}"), re, im, res])
                })
                .collect(),
        )
    }
}

//! CSV tables and the run manifest.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use rbm_green::model::{to_json, QuadrantParams};

/// Provenance of one output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    /// SHA-256 of the canonical JSON of the quadrant model.
    pub model_hash: String,
    pub model: serde_json::Value,
    pub seed: u64,
    pub params: serde_json::Map<String, serde_json::Value>,
    pub started: String,
    pub finished: String,
}

impl RunManifest {
    pub fn new(subcommand: &str, p: &QuadrantParams, seed: u64) -> Self {
        let canonical = to_json(p);
        let hash = Sha256::digest(canonical.as_bytes());
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            model_hash: hash.iter().map(|b| format!("{b:02x}")).collect(),
            model: serde_json::from_str(&canonical).expect("canonical model JSON"),
            seed,
            params: serde_json::Map::new(),
            started: now(),
            finished: String::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.params
            .insert(key.to_string(), serde_json::to_value(value).expect("serialisable parameter"));
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Lossless decimal text of a double: 17 significant digits, scientific.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// A table of string cells written as CSV after a `# manifest:` comment line.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    fn body(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }
}

/// Write `table` to `out` (or stdout) with the manifest embedded as the first
/// line; with a file target the manifest also goes to `<out>.manifest.json`.
pub fn emit(table: &Table, mut manifest: RunManifest, out: Option<&Path>) -> io::Result<()> {
    manifest.finished = now();
    let json = serde_json::to_string(&manifest).expect("manifest serialises");
    let mut bytes = format!("# manifest: {json}\n").into_bytes();
    bytes.extend(table.body()?);
    match out {
        Some(path) => {
            fs::write(path, &bytes)?;
            let pretty = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
            fs::write(sidecar(path), pretty + "\n")
        }
        None => io::stdout().lock().write_all(&bytes),
    }
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

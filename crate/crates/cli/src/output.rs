use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Provenance record written next to every set of outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub outputs: Vec<String>,
}

/// SHA-256 of the canonical JSON form (sorted keys, shortest floats).
pub fn digest<T: Serialize>(value: &T) -> Result<String, CliError> {
    let canonical = serde_json::to_value(value)
        .and_then(|v| serde_json::to_vec(&v))
        .map_err(|e| CliError::input(format!("cannot serialize configuration: {e}")))?;
    Ok(hex::encode(Sha256::digest(&canonical)))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Round-trip CSV float.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Six significant digits for human summaries.
pub fn sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// Collects output files for one run and writes them with the manifest.
pub struct OutputSet {
    dir: Option<PathBuf>,
    files: Vec<(String, String)>,
}

impl OutputSet {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir, files: Vec::new() }
    }

    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn finish(self, command: &str, config_digest: String, seed: Option<u64>) -> Result<(), CliError> {
        let Some(dir) = self.dir else { return Ok(()) };
        fs::create_dir_all(&dir).map_err(|source| CliError::Write { path: dir.clone(), source })?;
        for (name, contents) in &self.files {
            write_atomic(&dir.join(name), contents.as_bytes())?;
        }
        let manifest = RunManifest {
            command: command.to_string(),
            config_digest,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.files.into_iter().map(|(name, _)| name).collect(),
        };
        write_atomic(&dir.join(MANIFEST_FILE), to_json(&manifest).as_bytes())
    }
}

/// Writes to a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let err = |source| CliError::Write { path: path.to_path_buf(), source };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(err)?;
    f.write_all(bytes).map_err(err)?;
    f.sync_all().map_err(err)?;
    fs::rename(&tmp, path).map_err(err)
}

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Formats `x` with 12 significant digits, `%.12g` style.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_fraction(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// In-memory CSV table with a fixed header.
#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Record of one command invocation: the fully resolved parameters (usable
/// as `--config` to reproduce the run), digests of every file written and
/// the wall-clock time.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub master_seed: Option<u64>,
    pub parameters: serde_json::Value,
    pub outputs: Vec<OutputDigest>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, master_seed: Option<u64>, parameters: serde_json::Value) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed,
            parameters,
            outputs: Vec::new(),
            wall_clock_seconds: 0.0,
        }
    }

    pub fn record(&mut self, path: &Path, bytes: &[u8]) {
        self.outputs.push(OutputDigest {
            path: path.to_path_buf(),
            sha256: sha256_hex(bytes),
        });
    }

    pub fn finish(&mut self, elapsed: Duration) {
        self.wall_clock_seconds = elapsed.as_secs_f64();
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `dir/name.csv` -> `dir/name.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    let stem = csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    csv.with_file_name(format!("{stem}.manifest.json"))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes)
}

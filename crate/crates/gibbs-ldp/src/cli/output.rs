//! Artifact writers. CSVs are byte-identical across reruns with the same
//! (config, seed); the JSON sidecar carries the config hash, seed, wall time
//! and all derived constants of the run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::diagnostics::RConstants;
use crate::torus::Configuration;
use crate::Result;

pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<()> {
        std::fs::write(self.path(name), text)?;
        Ok(())
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable report");
        text.push('\n');
        self.write_text(name, &text)
    }
}

pub fn sha256_hex(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

/// The trailing JSON sidecar every run emits next to its CSVs.
#[derive(Serialize)]
pub struct Sidecar {
    pub subcommand: String,
    pub config_sha256: String,
    pub seed: u64,
    pub stream: u64,
    pub wall_time_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived_constants: Option<RConstants>,
    pub outputs: Vec<String>,
}

/// One configuration as a sample dump: header `x0,...,x{d-1}`, one point per
/// row, `Display` float formatting (shortest round-trip, locale-free).
pub fn configuration_csv(cfg: &Configuration) -> String {
    let d = cfg.window().dim();
    let mut out = String::new();
    for i in 0..d {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "x{i}");
    }
    out.push('\n');
    for p in cfg.points() {
        for (i, c) in p.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{c}");
        }
        out.push('\n');
    }
    out
}

/// Profile / estimate table: `n,estimate,std_error,samples,method`.
pub fn profile_csv(rows: &[(usize, f64, f64, u64, &str)]) -> String {
    let mut out = String::from("n,estimate,std_error,samples,method\n");
    for (n, est, se, samples, method) in rows {
        let _ = writeln!(out, "{n},{est},{se},{samples},{method}");
    }
    out
}

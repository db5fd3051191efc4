//! Output files and the per-run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub tool_version: String,
    pub wall_time_ms: u128,
    pub files: Vec<FileDigest>,
}

/// Collects written files; without a directory nothing is written.
pub struct Output {
    dir: Option<PathBuf>,
    files: Vec<FileDigest>,
    started: Instant,
}

impl Output {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Output {
            dir,
            files: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        self.files.push(FileDigest {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Compute(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Compute(e.to_string());
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Compute(e.to_string()))?;
        self.write(name, &bytes)
    }

    /// Write `manifest.json` listing every file written so far.
    pub fn finish(mut self, command: &str, parameters: BTreeMap<String, String>, seed: u64) -> Result<(), CliError> {
        if self.dir.is_none() {
            return Ok(());
        }
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = RunManifest {
            command: command.to_string(),
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_ms: self.started.elapsed().as_millis(),
            files: std::mem::take(&mut self.files),
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Compute(e.to_string()))? + "\n";
        let dir = self.dir.as_ref().expect("checked above");
        let path = dir.join("manifest.json");
        fs::write(&path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
    }
}

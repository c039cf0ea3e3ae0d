//! Run manifests: written before any result file, finalized with the
//! output inventory and content checksums when the run completes. An
//! interrupted run leaves `complete: false` behind.

use lsprobe_core::error::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskRecord {
    pub name: String,
    pub status: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_sha256: String,
    pub tool_version: String,
    pub started_unix: u64,
    pub finished_unix: Option<u64>,
    pub complete: bool,
    pub seed: Option<u64>,
    pub threads: usize,
    pub tasks: Vec<TaskRecord>,
    pub files: Vec<FileRecord>,
}

pub struct ManifestWriter {
    path: PathBuf,
    out_dir: PathBuf,
    manifest: RunManifest,
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl ManifestWriter {
    /// Create the output directory and write the initial (incomplete)
    /// manifest before any result file exists.
    pub fn begin(out_dir: &Path, config_bytes: &[u8], seed: Option<u64>, threads: usize) -> Result<Self> {
        std::fs::create_dir_all(out_dir)?;
        let manifest = RunManifest {
            config_sha256: sha256_hex(config_bytes),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix: now_unix(),
            finished_unix: None,
            complete: false,
            seed,
            threads,
            tasks: Vec::new(),
            files: Vec::new(),
        };
        let writer = ManifestWriter {
            path: out_dir.join("manifest.json"),
            out_dir: out_dir.to_path_buf(),
            manifest,
        };
        writer.flush()?;
        Ok(writer)
    }

    pub fn task(&mut self, name: &str, status: impl Into<String>) -> Result<()> {
        self.manifest.tasks.push(TaskRecord {
            name: name.to_string(),
            status: status.into(),
        });
        self.flush()
    }

    /// Register an emitted result file with its content checksum.
    pub fn file(&mut self, name: &str) -> Result<()> {
        let path = self.out_dir.join(name);
        let bytes = std::fs::read(&path)?;
        self.manifest.files.push(FileRecord {
            path: name.to_string(),
            sha256: sha256_hex(&bytes),
        });
        self.flush()
    }

    pub fn finish(mut self) -> Result<()> {
        self.manifest.finished_unix = Some(now_unix());
        self.manifest.complete = true;
        self.flush()
    }

    fn flush(&self) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.manifest)
            .map_err(|e| lsprobe_core::Error::Config(format!("manifest serialization: {e}")))?;
        std::fs::write(&self.path, json)?;
        Ok(())
    }
}

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::LoadedConfig;
use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Failed(format!("{}: {e}", path.display()))
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| io_err(path, e))?;
        w.write_all(b"\n").map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| io_err(path, format!("line {}: {e}", i + 1)))?);
    }
    Ok(out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn file_sha256(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    Ok(hex::encode(Sha256::digest(bytes)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub config_sha256: String,
    pub config: crate::RunConfig,
    pub inputs: Vec<FileEntry>,
    pub outputs: Vec<FileEntry>,
}

/// A stage's output directory under the work directory.
pub struct StageDir {
    pub stage: &'static str,
    pub dir: PathBuf,
}

impl StageDir {
    pub fn new(work_dir: &Path, stage: &'static str) -> Self {
        Self {
            stage,
            dir: work_dir.join(stage),
        }
    }

    pub fn create(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir).map_err(|e| io_err(&self.dir, e))
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Fail with a hint naming the stage that produces `name`.
    pub fn require(&self, name: &str) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        if p.exists() {
            Ok(p)
        } else {
            Err(CliError::Failed(format!(
                "{} not found; run `paracorp {}` first",
                p.display(),
                self.stage
            )))
        }
    }

    pub fn write_manifest(&self, config: &LoadedConfig, inputs: &[&Path], outputs: &[&str]) -> Result<(), CliError> {
        let entry = |p: &Path| -> Result<FileEntry, CliError> {
            Ok(FileEntry {
                name: p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
                sha256: file_sha256(p)?,
            })
        };
        let manifest = Manifest {
            stage: self.stage.to_string(),
            config_sha256: config.sha256.clone(),
            config: config.snapshot.clone(),
            inputs: inputs.iter().map(|p| entry(p)).collect::<Result<_, _>>()?,
            outputs: outputs.iter().map(|n| entry(&self.path(n))).collect::<Result<_, _>>()?,
        };
        write_json(&self.path(MANIFEST_FILE), &manifest)
    }
}

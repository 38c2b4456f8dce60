//! Translation cache, optionally persisted as an append-only JSON-lines file.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::provider::Lang;
use super::TranslateError;

pub const CACHE_FILE: &str = "translations.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub provider_id: String,
    pub src: Lang,
    pub dst: Lang,
    pub text_sha256: String,
}

impl CacheKey {
    pub fn new(provider_id: &str, src: &Lang, dst: &Lang, text: &str) -> Self {
        Self {
            provider_id: provider_id.to_string(),
            src: src.clone(),
            dst: dst.clone(),
            text_sha256: hex::encode(Sha256::digest(text.as_bytes())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub response_text: String,
    /// Unix milliseconds of the original provider call.
    pub timestamp: u64,
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    #[serde(flatten)]
    key: CacheKey,
    #[serde(flatten)]
    entry: CacheEntry,
}

/// Concurrent readers, serialized writers. Later lines win on replay.
#[derive(Debug, Default)]
pub struct TranslationCache {
    entries: RwLock<HashMap<CacheKey, CacheEntry>>,
    writer: Mutex<Option<File>>,
    path: Option<PathBuf>,
}

impl TranslationCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Open (or create) the cache stored under `dir`.
    pub fn open(dir: &Path) -> Result<Self, TranslateError> {
        fs::create_dir_all(dir).map_err(|e| TranslateError::Cache(format!("{}: {e}", dir.display())))?;
        let path = dir.join(CACHE_FILE);
        let mut entries = HashMap::new();
        if path.exists() {
            let file = File::open(&path).map_err(|e| TranslateError::Cache(format!("{}: {e}", path.display())))?;
            for (n, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| TranslateError::Cache(format!("{}: {e}", path.display())))?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<CacheLine>(&line) {
                    Ok(l) => {
                        entries.insert(l.key, l.entry);
                    }
                    // a torn final line after a crash is dropped
                    Err(e) => log::warn!("{}:{}: skipping unreadable cache line: {e}", path.display(), n + 1),
                }
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| TranslateError::Cache(format!("{}: {e}", path.display())))?;
        Ok(Self {
            entries: RwLock::new(entries),
            writer: Mutex::new(Some(file)),
            path: Some(path),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &CacheKey) -> Option<CacheEntry> {
        self.entries.read().unwrap().get(key).cloned()
    }

    pub fn insert(&self, key: CacheKey, entry: CacheEntry) -> Result<(), TranslateError> {
        let mut writer = self.writer.lock().unwrap();
        if let Some(file) = writer.as_mut() {
            let mut line = serde_json::to_string(&CacheLine {
                key: key.clone(),
                entry: entry.clone(),
            })
            .expect("cache line serializes");
            line.push('\n');
            file.write_all(line.as_bytes())
                .and_then(|_| file.flush())
                .map_err(|e| TranslateError::Cache(e.to_string()))?;
        }
        self.entries.write().unwrap().insert(key, entry);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

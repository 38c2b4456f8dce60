use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Document, PrepError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IngestConfig {
    /// Directory of text files, or a line-delimited JSON record file.
    pub path: PathBuf,
    /// File extension picked up in directory mode.
    pub extension: String,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            path: PathBuf::from("corpus"),
            extension: "txt".into(),
        }
    }
}

/// A non-fatal per-input problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub location: String,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct LoadReport {
    pub documents: Vec<Document>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Deserialize)]
struct Record {
    doc_id: String,
    #[serde(default)]
    source_name: String,
    text: String,
}

/// Load documents from a directory (one document per file, searched
/// recursively, sorted by path) or from a line-delimited record file with
/// `doc_id`, `source_name` and `text` fields.
///
/// Doc ids in directory mode are the path relative to the root without the
/// extension. Files with invalid UTF-8, empty documents and duplicate ids are
/// skipped with a diagnostic.
pub fn load_documents(path: &Path, config: &IngestConfig) -> Result<LoadReport, PrepError> {
    let meta = fs::metadata(path).map_err(|source| PrepError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut report = if meta.is_dir() {
        load_directory(path, &config.extension)?
    } else {
        load_records(path)?
    };
    dedupe(&mut report);
    Ok(report)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PrepError + '_ {
    move |source| PrepError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn collect_files(dir: &Path, extension: &str, out: &mut Vec<PathBuf>) -> Result<(), PrepError> {
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        let path = entry.path();
        if path.is_dir() {
            collect_files(&path, extension, out)?;
        } else if path.extension().and_then(|e| e.to_str()) == Some(extension) {
            out.push(path);
        }
    }
    Ok(())
}

fn load_directory(root: &Path, extension: &str) -> Result<LoadReport, PrepError> {
    let mut files = Vec::new();
    collect_files(root, extension, &mut files)?;
    files.sort();

    let root_name = root
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut report = LoadReport::default();
    for file in files {
        let rel = file.strip_prefix(root).unwrap_or(&file);
        let location = rel.display().to_string();
        let bytes = match fs::read(&file) {
            Ok(b) => b,
            Err(e) => {
                report.diagnostics.push(Diagnostic {
                    location,
                    message: format!("unreadable: {e}"),
                });
                continue;
            }
        };
        let text = match String::from_utf8(bytes) {
            Ok(t) => t,
            Err(e) => {
                report.diagnostics.push(Diagnostic {
                    location,
                    message: format!("invalid UTF-8 at byte {}", e.utf8_error().valid_up_to()),
                });
                continue;
            }
        };
        let doc_id = rel
            .with_extension("")
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        let source_name = match rel.components().count() {
            1 => root_name.clone(),
            _ => rel.components().next().unwrap().as_os_str().to_string_lossy().into_owned(),
        };
        report.documents.push(Document {
            doc_id,
            source_name,
            text,
        });
    }
    Ok(report)
}

fn load_records(path: &Path) -> Result<LoadReport, PrepError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let mut report = LoadReport::default();
    for (n, line) in bytes.split(|&b| b == b'\n').enumerate() {
        let location = format!("{}:{}", path.display(), n + 1);
        let Ok(line) = std::str::from_utf8(line) else {
            report.diagnostics.push(Diagnostic {
                location,
                message: "invalid UTF-8".into(),
            });
            continue;
        };
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Record>(line) {
            Ok(r) => report.documents.push(Document {
                doc_id: r.doc_id,
                source_name: r.source_name,
                text: r.text,
            }),
            Err(e) => report.diagnostics.push(Diagnostic {
                location,
                message: format!("malformed record: {e}"),
            }),
        }
    }
    Ok(report)
}

fn dedupe(report: &mut LoadReport) {
    let mut seen = HashSet::new();
    let diagnostics = &mut report.diagnostics;
    report.documents.retain(|d| {
        if d.text.trim().is_empty() {
            diagnostics.push(Diagnostic {
                location: d.doc_id.clone(),
                message: "empty document".into(),
            });
            false
        } else if !seen.insert(d.doc_id.clone()) {
            diagnostics.push(Diagnostic {
                location: d.doc_id.clone(),
                message: "duplicate doc_id".into(),
            });
            false
        } else {
            true
        }
    });
}

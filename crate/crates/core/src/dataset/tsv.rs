//! TSV distribution format.
//!
//! Columns: `pair_id, sentence_1, sentence_2, label, near_paraphrase, origin`
//! with a header row, labels and flags as 0/1. Provenance goes to a sidecar
//! `<file>.meta.json`. Import also accepts the ID-less three-column layout
//! `sentence_1, sentence_2, label` (header optional).

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{DatasetError, DatasetSplit, Label, LabeledPair, Origin, Provenance, SplitName};

pub const TSV_HEADER: [&str; 6] = ["pair_id", "sentence_1", "sentence_2", "label", "near_paraphrase", "origin"];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExportSummary {
    pub rows: usize,
    /// Fields in which tabs or line breaks were replaced by spaces.
    pub sanitized_fields: usize,
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn sanitize(field: &str, pair_id: &str, count: &mut usize) -> String {
    if field.contains(['\t', '\n', '\r']) {
        *count += 1;
        log::warn!("{pair_id}: replaced tab/newline characters with spaces");
        field.replace(['\t', '\n', '\r'], " ")
    } else {
        field.to_string()
    }
}

pub fn export_tsv(split: &DatasetSplit, path: &Path) -> Result<ExportSummary, DatasetError> {
    let file = fs::File::create(path).map_err(io_error(path))?;
    let mut out = BufWriter::new(file);
    let mut summary = ExportSummary::default();
    let mut body = String::new();
    body.push_str(&TSV_HEADER.join("\t"));
    body.push('\n');
    for pair in &split.pairs {
        let fields = [
            sanitize(&pair.pair_id, &pair.pair_id, &mut summary.sanitized_fields),
            sanitize(&pair.sentence_1, &pair.pair_id, &mut summary.sanitized_fields),
            sanitize(&pair.sentence_2, &pair.pair_id, &mut summary.sanitized_fields),
            pair.label.bit().to_string(),
            u8::from(pair.near_paraphrase).to_string(),
            pair.origin.as_str().to_string(),
        ];
        body.push_str(&fields.join("\t"));
        body.push('\n');
        summary.rows += 1;
    }
    out.write_all(body.as_bytes()).and_then(|_| out.flush()).map_err(io_error(path))?;

    let meta = sidecar(path);
    let json = serde_json::to_string_pretty(&split.provenance).expect("provenance serializes");
    fs::write(&meta, json + "\n").map_err(io_error(&meta))?;
    Ok(summary)
}

fn parse_bit(value: &str) -> Option<bool> {
    match value {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

pub fn import_tsv(path: &Path, name: SplitName) -> Result<DatasetSplit, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    let malformed = |line: usize, message: String| DatasetError::Malformed {
        path: path.display().to_string(),
        line,
        message,
    };
    let mut pairs = Vec::new();
    let mut width = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.is_empty() {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').collect();
        let expected = *width.get_or_insert(cols.len());
        if idx == 0 {
            if cols == TSV_HEADER {
                continue;
            }
            if cols.len() == 3 && parse_bit(cols[2]).is_none() {
                continue;
            }
        }
        if cols.len() != expected || !(expected == 6 || expected == 3) {
            return Err(malformed(line, format!("expected 6 (or 3) columns, found {}", cols.len())));
        }
        let label_col = if expected == 6 { 3 } else { 2 };
        let label = parse_bit(cols[label_col])
            .map(Label::from_bit)
            .ok_or_else(|| malformed(line, format!("label must be 0 or 1, found {:?}", cols[label_col])))?;
        let pair = if expected == 6 {
            let near = parse_bit(cols[4])
                .ok_or_else(|| malformed(line, format!("near_paraphrase must be 0 or 1, found {:?}", cols[4])))?;
            let origin =
                Origin::parse(cols[5]).ok_or_else(|| malformed(line, format!("unknown origin {:?}", cols[5])))?;
            LabeledPair {
                pair_id: cols[0].to_string(),
                sentence_1: cols[1].to_string(),
                sentence_2: cols[2].to_string(),
                label,
                near_paraphrase: near,
                origin,
            }
        } else {
            LabeledPair {
                pair_id: format!("row-{line}"),
                sentence_1: cols[0].to_string(),
                sentence_2: cols[1].to_string(),
                label,
                near_paraphrase: false,
                origin: Origin::External,
            }
        };
        pair.validate().map_err(|e| malformed(line, e.to_string()))?;
        pairs.push(pair);
    }

    let meta = sidecar(path);
    let provenance = if meta.exists() {
        let json = fs::read_to_string(&meta).map_err(io_error(&meta))?;
        serde_json::from_str::<Option<Provenance>>(&json).map_err(|e| malformed(0, format!("sidecar: {e}")))?
    } else {
        None
    };
    Ok(DatasetSplit { name, pairs, provenance })
}

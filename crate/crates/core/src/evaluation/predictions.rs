use std::fmt::Write as _;
use std::path::Path;

use super::{EvalError, PredictionSet};
use crate::dataset::Label;

/// Read `pair_id<TAB>label` lines with labels 0/1 (1 = paraphrase). A first
/// line whose label column is not 0/1 is taken as a header.
pub fn read_predictions(path: &Path, model_id: &str) -> Result<PredictionSet, EvalError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| EvalError::Io {
        path: display.clone(),
        message: e.to_string(),
    })?;
    let malformed = |line: usize, message: String| EvalError::Malformed {
        path: display.clone(),
        line,
        message,
    };
    let mut set = PredictionSet::new(model_id);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(malformed(i + 1, format!("expected 2 tab-separated fields, found {}", fields.len())));
        }
        let label = match fields[1].trim() {
            "1" => Label::Paraphrase,
            "0" => Label::NonParaphrase,
            _ if i == 0 => continue,
            other => return Err(malformed(i + 1, format!("label must be 0 or 1, found {other:?}"))),
        };
        let id = fields[0].trim().to_string();
        if set.entries.insert(id.clone(), label).is_some() {
            return Err(malformed(i + 1, format!("duplicate pair_id {id}")));
        }
    }
    Ok(set)
}

pub fn write_predictions(set: &PredictionSet, path: &Path) -> Result<(), EvalError> {
    let mut out = String::from("pair_id\tlabel\n");
    for (id, label) in &set.entries {
        let _ = writeln!(out, "{id}\t{}", label.bit());
    }
    std::fs::write(path, out).map_err(|e| EvalError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

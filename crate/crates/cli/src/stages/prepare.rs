use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use paracorp::corpus_prep::{
    load_documents, segment_sentences, Diagnostic, FilterReason, Segmenter, SelectionFilter,
};

use super::{DECISIONS_FILE, PREPARE, REPORT_FILE, SENTENCES_FILE};
use crate::config::LoadedConfig;
use crate::store::{write_json, write_jsonl, StageDir};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepareSummary {
    pub documents: usize,
    pub sentences: usize,
    pub kept: usize,
    /// Count per filter reason, `kept` included.
    pub reasons: BTreeMap<String, usize>,
    pub diagnostics: Vec<Diagnostic>,
}

impl PrepareSummary {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "documents  {}", self.documents);
        let _ = writeln!(out, "sentences  {}", self.sentences);
        for (reason, n) in &self.reasons {
            let _ = writeln!(out, "  {reason:<14} {n}");
        }
        if !self.diagnostics.is_empty() {
            let _ = writeln!(out, "diagnostics {}", self.diagnostics.len());
        }
        out
    }
}

pub fn prepare(config: &LoadedConfig) -> Result<PrepareSummary, CliError> {
    let cfg = &config.resolved;
    let tokenizer = cfg.tokenizer()?;
    let segmenter = Segmenter::new(&cfg.segmenter);
    let filter = SelectionFilter::new(&cfg.filters)?;

    let report = load_documents(&cfg.ingest.path, &cfg.ingest)?;
    for d in &report.diagnostics {
        log::warn!("{}: {}", d.location, d.message);
    }
    if report.documents.is_empty() {
        log::warn!("no documents found under {}", cfg.ingest.path.display());
    }
    let sentences: Vec<_> = report
        .documents
        .iter()
        .flat_map(|doc| segment_sentences(doc, &segmenter, &tokenizer))
        .collect();
    let n_sentences = sentences.len();
    let (kept, decisions) = filter.apply(sentences);

    let mut reasons: BTreeMap<String, usize> =
        FilterReason::ALL.iter().map(|r| (r.as_str().to_string(), 0)).collect();
    for d in &decisions {
        *reasons.get_mut(d.reason.as_str()).expect("known reason") += 1;
    }
    let summary = PrepareSummary {
        documents: report.documents.len(),
        sentences: n_sentences,
        kept: kept.len(),
        reasons,
        diagnostics: report.diagnostics,
    };

    let stage = StageDir::new(&cfg.paths.work_dir, PREPARE);
    stage.create()?;
    write_jsonl(&stage.path(SENTENCES_FILE), &kept)?;
    write_jsonl(&stage.path(DECISIONS_FILE), &decisions)?;
    write_json(&stage.path(REPORT_FILE), &summary)?;
    stage.write_manifest(config, &[], &[SENTENCES_FILE, DECISIONS_FILE, REPORT_FILE])?;
    Ok(summary)
}

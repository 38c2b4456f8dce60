use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use paracorp::backtranslate::{GeneratedPair, Generator, PairStatus};
use paracorp::corpus_prep::{Segmenter, Sentence};

use super::{GENERATE, PAIRS_FILE, PREPARE, REPORT_FILE, SENTENCES_FILE};
use crate::config::LoadedConfig;
use crate::store::{read_jsonl, write_json, write_jsonl, StageDir};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateSummary {
    pub provider: String,
    pub sentences: usize,
    pub statuses: BTreeMap<String, usize>,
    /// Requests sent to the provider in this run; cache hits excluded.
    pub provider_calls: usize,
    pub cache_entries: usize,
}

impl GenerateSummary {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "provider   {}", self.provider);
        let _ = writeln!(out, "sentences  {}", self.sentences);
        for (status, n) in &self.statuses {
            let _ = writeln!(out, "  {status:<24} {n}");
        }
        let _ = writeln!(out, "provider calls  {}", self.provider_calls);
        let _ = writeln!(out, "cache entries   {}", self.cache_entries);
        out
    }
}

pub fn generate(config: &LoadedConfig) -> Result<GenerateSummary, CliError> {
    let cfg = &config.resolved;
    let prep = StageDir::new(&cfg.paths.work_dir, PREPARE);
    let input = prep.require(SENTENCES_FILE)?;
    let sentences: Vec<Sentence> = read_jsonl(&input)?;

    let mut settings = cfg.provider.clone();
    settings.cache_dir = Some(cfg.cache_dir());
    let translator = Arc::new(settings.build_translator()?);
    let generator = Generator::new(Arc::clone(&translator), cfg.generation.clone(), Segmenter::new(&cfg.segmenter))?;
    let pairs: Vec<GeneratedPair> = generator.generate_batch(&sentences);

    let mut statuses: BTreeMap<String, usize> =
        PairStatus::ALL.iter().map(|s| (s.as_str().to_string(), 0)).collect();
    for p in &pairs {
        *statuses.get_mut(p.status.as_str()).expect("known status") += 1;
    }
    let summary = GenerateSummary {
        provider: translator.provider_id().to_string(),
        sentences: sentences.len(),
        statuses,
        provider_calls: translator.provider_calls(),
        cache_entries: translator.cache().len(),
    };

    let stage = StageDir::new(&cfg.paths.work_dir, GENERATE);
    stage.create()?;
    write_jsonl(&stage.path(PAIRS_FILE), &pairs)?;
    write_json(&stage.path(REPORT_FILE), &summary)?;
    stage.write_manifest(config, &[&input], &[PAIRS_FILE, REPORT_FILE])?;
    Ok(summary)
}

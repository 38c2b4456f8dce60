//! Labeled train/test splits: negative-pair synthesis, assembly,
//! statistics, and the TSV distribution format.

mod negatives;
mod stats;
mod tsv;

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use negatives::{consecutive_negative_pairs, random_negative_pairs, NegativeQuotas, Quota};
pub use stats::{pair_scores, render_diversity_table, render_stats_table, split_stats, SplitStats};
pub use tsv::{export_tsv, import_tsv, ExportSummary, TSV_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("requested {requested} {kind} pairs but only {available} are achievable")]
    Shortfall {
        kind: &'static str,
        requested: usize,
        available: usize,
    },
    #[error("duplicate pair_id {0}")]
    DuplicatePairId(String),
    #[error("pair {pair_id}: {reason}")]
    InvalidPair { pair_id: String, reason: &'static str },
    #[error("{path}:{line}: {message}")]
    Malformed { path: String, line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Paraphrase,
    NonParaphrase,
}

impl Label {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Label::Paraphrase
        } else {
            Label::NonParaphrase
        }
    }

    /// 1 for paraphrase, 0 otherwise.
    pub fn bit(self) -> u8 {
        match self {
            Label::Paraphrase => 1,
            Label::NonParaphrase => 0,
        }
    }

    pub fn is_paraphrase(self) -> bool {
        self == Label::Paraphrase
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Paraphrase => "paraphrase",
            Label::NonParaphrase => "non_paraphrase",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Backtranslation,
    Consecutive,
    Random,
    /// Imported from a file that carries no origin column.
    External,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Backtranslation => "backtranslation",
            Origin::Consecutive => "consecutive",
            Origin::Random => "random",
            Origin::External => "external",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "backtranslation" => Origin::Backtranslation,
            "consecutive" => Origin::Consecutive,
            "random" => Origin::Random,
            "external" => Origin::External,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub pair_id: String,
    pub sentence_1: String,
    pub sentence_2: String,
    pub label: Label,
    pub near_paraphrase: bool,
    pub origin: Origin,
}

impl LabeledPair {
    pub fn validate(&self) -> Result<(), DatasetError> {
        let invalid = |reason| DatasetError::InvalidPair {
            pair_id: self.pair_id.clone(),
            reason,
        };
        if matches!(self.origin, Origin::Consecutive | Origin::Random) && self.label.is_paraphrase() {
            return Err(invalid("synthetic negatives must be labeled non_paraphrase"));
        }
        if self.near_paraphrase && self.label.is_paraphrase() {
            return Err(invalid("near-paraphrase pairs must be labeled non_paraphrase"));
        }
        Ok(())
    }

    pub fn key(&self) -> (String, String) {
        pair_key(&self.sentence_1, &self.sentence_2)
    }
}

/// Order-insensitive identity of a sentence pair.
pub fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitName {
    Train,
    Test,
}

impl SplitName {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitName::Train => "train",
            SplitName::Test => "test",
        }
    }
}

impl fmt::Display for SplitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub name: SplitName,
    pub pairs: Vec<LabeledPair>,
    pub provenance: Option<Provenance>,
}

/// Merge positives and negatives, drop order-insensitive duplicate sentence
/// pairs (first occurrence wins), and shuffle with `provenance.seed`.
pub fn assemble_split(
    name: SplitName,
    positives: Vec<LabeledPair>,
    negatives: Vec<LabeledPair>,
    provenance: Provenance,
) -> Result<DatasetSplit, DatasetError> {
    let mut ids = HashSet::new();
    let mut keys = HashSet::new();
    let mut pairs = Vec::with_capacity(positives.len() + negatives.len());
    let mut dropped = 0usize;
    for pair in positives.into_iter().chain(negatives) {
        pair.validate()?;
        if !ids.insert(pair.pair_id.clone()) {
            return Err(DatasetError::DuplicatePairId(pair.pair_id));
        }
        if keys.insert(pair.key()) {
            pairs.push(pair);
        } else {
            dropped += 1;
        }
    }
    if dropped > 0 {
        log::warn!("{name}: dropped {dropped} duplicate sentence pairs");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(provenance.seed);
    pairs.shuffle(&mut rng);
    Ok(DatasetSplit {
        name,
        pairs,
        provenance: Some(provenance),
    })
}

//! Pair-level and corpus-level similarity metrics: token-set Jaccard,
//! word-level edit distance ("diversity"), corpus means and Cohen's kappa.

mod edit;
mod kappa;

use std::collections::HashSet;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::corpus_prep::{fold, Token, Tokenizer};

pub use edit::{indel_distance, word_edit_distance};
pub use kappa::{cohens_kappa, Kappa};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("cannot aggregate an empty collection")]
    EmptyAggregate,
    #[error("label lists differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JaccardConfig {
    pub include_stopwords: bool,
    pub case_fold: bool,
}

impl Default for JaccardConfig {
    fn default() -> Self {
        Self {
            include_stopwords: true,
            case_fold: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiversityConfig {
    /// Levenshtein when true, insert/delete only when false.
    pub allow_substitution: bool,
}

impl Default for DiversityConfig {
    fn default() -> Self {
        Self {
            allow_substitution: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    pub jaccard: JaccardConfig,
    pub diversity: DiversityConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JaccardScore {
    pub pair_id: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiversityScore {
    pub pair_id: String,
    pub edits: usize,
}

/// |A ∩ B| / |A ∪ B|, defined as 1 when both sets are empty.
pub fn jaccard_sets<T: Eq + Hash>(a: &HashSet<T>, b: &HashSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

fn word_form(token: &Token, case_fold: bool) -> String {
    if case_fold {
        fold(&token.surface)
    } else {
        token.surface.clone()
    }
}

/// Jaccard similarity over the two sentences' word/number token sets;
/// punctuation is always excluded.
pub fn jaccard(tokens_a: &[Token], tokens_b: &[Token], config: &JaccardConfig) -> f64 {
    let set = |tokens: &[Token]| -> HashSet<String> {
        tokens
            .iter()
            .filter(|t| !t.is_punctuation() && (config.include_stopwords || !t.is_stopword))
            .map(|t| word_form(t, config.case_fold))
            .collect()
    };
    jaccard_sets(&set(tokens_a), &set(tokens_b))
}

/// Case-folded content tokens: punctuation and stopwords removed.
pub fn content_sequence(tokens: &[Token]) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| t.is_content())
        .map(|t| fold(&t.surface))
        .collect()
}

/// Word-level edits between the content sequences of two sentences.
pub fn diversity(tokens_a: &[Token], tokens_b: &[Token], config: &DiversityConfig) -> usize {
    edit::edit_distance(
        &content_sequence(tokens_a),
        &content_sequence(tokens_b),
        config.allow_substitution,
    )
}

pub fn corpus_mean(scores: &[f64]) -> Result<f64, MetricsError> {
    if scores.is_empty() {
        return Err(MetricsError::EmptyAggregate);
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Per-pair scores in one record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScores {
    pub pair_id: String,
    pub jaccard: f64,
    pub diversity: usize,
}

/// Tokenizes raw sentence pairs and scores them under one configuration.
#[derive(Debug, Clone, Default)]
pub struct PairScorer {
    tokenizer: Tokenizer,
    config: MetricsConfig,
}

impl PairScorer {
    pub fn new(tokenizer: Tokenizer, config: MetricsConfig) -> Self {
        Self { tokenizer, config }
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }

    pub fn jaccard(&self, a: &str, b: &str) -> f64 {
        jaccard(&self.tokenizer.tokenize(a), &self.tokenizer.tokenize(b), &self.config.jaccard)
    }

    pub fn diversity(&self, a: &str, b: &str) -> usize {
        diversity(&self.tokenizer.tokenize(a), &self.tokenizer.tokenize(b), &self.config.diversity)
    }

    pub fn score(&self, pair_id: &str, a: &str, b: &str) -> PairScores {
        let ta = self.tokenizer.tokenize(a);
        let tb = self.tokenizer.tokenize(b);
        PairScores {
            pair_id: pair_id.to_string(),
            jaccard: jaccard(&ta, &tb, &self.config.jaccard),
            diversity: diversity(&ta, &tb, &self.config.diversity),
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::corpus_prep::Stopwords;

    fn tk() -> Tokenizer {
        Tokenizer::new(Arc::new(Stopwords::parse("բ\nէ")))
    }

    #[test]
    fn jaccard_identical_and_disjoint() {
        let t = tk();
        let a = t.tokenize("ա գ դ");
        assert_eq!(jaccard(&a, &a, &JaccardConfig::default()), 1.0);
        let b = t.tokenize("ե զ");
        assert_eq!(jaccard(&a, &b, &JaccardConfig::default()), 0.0);
    }

    #[test]
    fn jaccard_half_overlap() {
        // {ա,բ,գ} ∩ {բ,գ,դ} = {բ,գ}; union has 4 elements
        let t = tk();
        let v = jaccard(&t.tokenize("ա բ գ։"), &t.tokenize("բ, գ դ"), &JaccardConfig::default());
        assert_eq!(v, 0.5);
    }

    #[test]
    fn jaccard_stopword_toggle_and_case() {
        let t = tk();
        let cfg = JaccardConfig {
            include_stopwords: false,
            case_fold: true,
        };
        // without stopword բ: {ա,գ} vs {գ,դ}
        let v = jaccard(&t.tokenize("Ա բ գ"), &t.tokenize("բ գ դ"), &cfg);
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        let strict = JaccardConfig {
            include_stopwords: true,
            case_fold: false,
        };
        assert_eq!(jaccard(&t.tokenize("Ա"), &t.tokenize("ա"), &strict), 0.0);
    }

    #[test]
    fn both_empty_is_one() {
        let t = tk();
        assert_eq!(jaccard(&t.tokenize("։"), &t.tokenize(""), &JaccardConfig::default()), 1.0);
    }

    #[test]
    fn diversity_ignores_stopwords() {
        let t = tk();
        let d = diversity(&t.tokenize("Ա բ Գ"), &t.tokenize("Ա Գ Դ"), &DiversityConfig::default());
        assert_eq!(d, 1);
        let d = diversity(&t.tokenize("Ա է Գ։"), &t.tokenize("ա Գ բ"), &DiversityConfig::default());
        assert_eq!(d, 0);
    }

    #[test]
    fn means() {
        assert_eq!(corpus_mean(&[2.0, 4.0]).unwrap(), 3.0);
        assert_eq!(corpus_mean(&[7.5]).unwrap(), 7.5);
        assert_eq!(corpus_mean(&[]), Err(MetricsError::EmptyAggregate));
    }

    #[test]
    fn mean_of_hundred_known_edit_counts() {
        // pair i differs from its source by (i % 7) appended words
        let t = tk();
        let scorer = PairScorer::new(t, MetricsConfig::default());
        let mut scores = Vec::new();
        let mut hand_sum = 0usize;
        for i in 0..100 {
            let src = "մեկ երկու երեք";
            let extra: Vec<String> = (0..i % 7).map(|k| format!("նոր{k}")).collect();
            let cand = format!("{src} {}", extra.join(" "));
            hand_sum += i % 7;
            scores.push(scorer.diversity(src, &cand) as f64);
        }
        assert_eq!(corpus_mean(&scores).unwrap(), hand_sum as f64 / 100.0);
    }
}

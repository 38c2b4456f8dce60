use std::collections::BTreeMap;
use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DatasetSplit, Label, Origin, SplitName};
use crate::pair_metrics::{corpus_mean, PairScorer, PairScores};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitStats {
    pub split: SplitName,
    pub n_paraphrase: usize,
    pub n_non_paraphrase: usize,
    pub n_total: usize,
    /// `None` when the split has no pair with that label.
    pub mean_jaccard_paraphrase: Option<f64>,
    pub mean_jaccard_non_paraphrase: Option<f64>,
    /// Mean word-level edits over paraphrase pairs.
    pub mean_diversity_paraphrase: Option<f64>,
    /// `origin -> [paraphrase, non_paraphrase]` counts.
    pub by_origin: BTreeMap<Origin, [usize; 2]>,
}

/// Per-pair scores in split order.
pub fn pair_scores(split: &DatasetSplit, scorer: &PairScorer) -> Vec<PairScores> {
    split
        .pairs
        .par_iter()
        .map(|p| scorer.score(&p.pair_id, &p.sentence_1, &p.sentence_2))
        .collect()
}

pub fn split_stats(split: &DatasetSplit, scorer: &PairScorer) -> SplitStats {
    let scores = pair_scores(split, scorer);
    let mut jac: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut div = Vec::new();
    let mut by_origin: BTreeMap<Origin, [usize; 2]> = BTreeMap::new();
    for (pair, score) in split.pairs.iter().zip(&scores) {
        let slot = usize::from(pair.label == Label::NonParaphrase);
        jac[slot].push(score.jaccard);
        by_origin.entry(pair.origin).or_default()[slot] += 1;
        if pair.label.is_paraphrase() {
            div.push(score.diversity as f64);
        }
    }
    SplitStats {
        split: split.name,
        n_paraphrase: jac[0].len(),
        n_non_paraphrase: jac[1].len(),
        n_total: split.pairs.len(),
        mean_jaccard_paraphrase: corpus_mean(&jac[0]).ok(),
        mean_jaccard_non_paraphrase: corpus_mean(&jac[1]).ok(),
        mean_diversity_paraphrase: corpus_mean(&div).ok(),
        by_origin,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"))
}

/// Label distribution table: counts and mean Jaccard per label, then totals,
/// followed by the origin breakdown.
pub fn render_stats_table(stats: &[SplitStats]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<6} | {:>10} {:>12} | {:>10} {:>12} | {:>6}",
        "", "Paraphrase", "Avg Jaccard", "Non-para", "Avg Jaccard", "Total"
    )
    .unwrap();
    writeln!(out, "{}", "-".repeat(70)).unwrap();
    for s in stats {
        writeln!(
            out,
            "{:<6} | {:>10} {:>12} | {:>10} {:>12} | {:>6}",
            s.split.as_str(),
            s.n_paraphrase,
            opt(s.mean_jaccard_paraphrase),
            s.n_non_paraphrase,
            opt(s.mean_jaccard_non_paraphrase),
            s.n_total
        )
        .unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "{:<6} | {:<16} | {:>10} {:>10}", "split", "origin", "para", "non-para").unwrap();
    for s in stats {
        for (origin, [p, n]) in &s.by_origin {
            writeln!(out, "{:<6} | {:<16} | {:>10} {:>10}", s.split.as_str(), origin.as_str(), p, n).unwrap();
        }
    }
    out
}

/// Mean paraphrase diversity per split.
pub fn render_diversity_table(stats: &[SplitStats]) -> String {
    let mut out = String::new();
    writeln!(out, "{:<6} | {:>20}", "split", "Paraphrase diversity").unwrap();
    writeln!(out, "{}", "-".repeat(29)).unwrap();
    for s in stats {
        let v = s.mean_diversity_paraphrase.map_or_else(|| "-".into(), |d| format!("{d:.2}"));
        writeln!(out, "{:<6} | {:>20}", s.split.as_str(), v).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_prep::Tokenizer;
    use crate::dataset::LabeledPair;
    use crate::pair_metrics::MetricsConfig;

    fn pair(id: &str, a: &str, b: &str, label: Label, origin: Origin) -> LabeledPair {
        LabeledPair {
            pair_id: id.into(),
            sentence_1: a.into(),
            sentence_2: b.into(),
            label,
            near_paraphrase: false,
            origin,
        }
    }

    #[test]
    fn identical_paraphrase_has_unit_jaccard() {
        let split = DatasetSplit {
            name: SplitName::Test,
            pairs: vec![pair("a", "ա բ գ", "ա բ գ", Label::Paraphrase, Origin::Backtranslation)],
            provenance: None,
        };
        let stats = split_stats(&split, &PairScorer::new(Tokenizer::default(), MetricsConfig::default()));
        assert_eq!(stats.mean_jaccard_paraphrase, Some(1.0));
        assert_eq!(stats.mean_jaccard_non_paraphrase, None);
        assert_eq!(stats.mean_diversity_paraphrase, Some(0.0));
        assert_eq!((stats.n_paraphrase, stats.n_non_paraphrase, stats.n_total), (1, 0, 1));
    }

    #[test]
    fn per_label_means_and_origins() {
        let split = DatasetSplit {
            name: SplitName::Train,
            pairs: vec![
                pair("a", "ա բ գ", "բ գ դ", Label::Paraphrase, Origin::Backtranslation),
                pair("b", "ա բ", "ա բ", Label::Paraphrase, Origin::Backtranslation),
                pair("c", "ա", "բ", Label::NonParaphrase, Origin::Random),
                pair("d", "ա բ", "բ գ", Label::NonParaphrase, Origin::Backtranslation),
            ],
            provenance: None,
        };
        let stats = split_stats(&split, &PairScorer::new(Tokenizer::default(), MetricsConfig::default()));
        assert_eq!(stats.mean_jaccard_paraphrase, Some(0.75));
        assert!((stats.mean_jaccard_non_paraphrase.unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(stats.by_origin[&Origin::Backtranslation], [2, 1]);
        assert_eq!(stats.by_origin[&Origin::Random], [0, 1]);
        let table = render_stats_table(&[stats.clone()]);
        assert!(table.contains("0.750"));
        assert!(render_diversity_table(&[stats]).contains("train"));
    }
}

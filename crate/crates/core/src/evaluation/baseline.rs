use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{prf_accuracy, ConfusionCounts, EvalError, PredictionSet};
use crate::dataset::{DatasetSplit, Label};
use crate::pair_metrics::PairScorer;

fn pair_jaccards(split: &DatasetSplit, scorer: &PairScorer) -> Vec<f64> {
    split
        .pairs
        .par_iter()
        .map(|p| scorer.jaccard(&p.sentence_1, &p.sentence_2))
        .collect()
}

/// Predict paraphrase exactly when the pair's Jaccard similarity reaches
/// `threshold`.
pub fn jaccard_baseline(
    split: &DatasetSplit,
    threshold: f64,
    scorer: &PairScorer,
) -> Result<PredictionSet, EvalError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(EvalError::InvalidThreshold(threshold));
    }
    let scores = pair_jaccards(split, scorer);
    let entries = split
        .pairs
        .iter()
        .zip(scores)
        .map(|(p, j)| (p.pair_id.clone(), Label::from_bit(j >= threshold)))
        .collect();
    Ok(PredictionSet {
        model_id: format!("jaccard>={threshold}"),
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdChoice {
    pub threshold: f64,
    pub f1: f64,
    /// Set when the split holds only one label and no threshold is informative.
    pub degenerate: bool,
}

/// Pick the F1-maximizing threshold among 0 and the observed Jaccard
/// values; ties go to the lowest threshold.
pub fn tune_threshold(train: &DatasetSplit, scorer: &PairScorer) -> Result<ThresholdChoice, EvalError> {
    let scores = pair_jaccards(train, scorer);
    let labels: Vec<Label> = train.pairs.iter().map(|p| p.label).collect();
    tune_on_scores(&scores, &labels)
}

pub(crate) fn tune_on_scores(scores: &[f64], labels: &[Label]) -> Result<ThresholdChoice, EvalError> {
    if scores.is_empty() {
        return Err(EvalError::EmptySplit);
    }
    let mut pos: Vec<f64> = Vec::new();
    let mut neg: Vec<f64> = Vec::new();
    for (&s, l) in scores.iter().zip(labels) {
        if l.is_paraphrase() {
            pos.push(s);
        } else {
            neg.push(s);
        }
    }
    if pos.is_empty() || neg.is_empty() {
        let f1 = prf_accuracy(&ConfusionCounts {
            tp: pos.len(),
            fp: neg.len(),
            fn_: 0,
            tn: 0,
        })
        .f1;
        return Ok(ThresholdChoice {
            threshold: 0.0,
            f1,
            degenerate: true,
        });
    }
    pos.sort_by(f64::total_cmp);
    neg.sort_by(f64::total_cmp);
    let mut grid: Vec<f64> = std::iter::once(0.0).chain(scores.iter().copied()).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut best = ThresholdChoice {
        threshold: 0.0,
        f1: -1.0,
        degenerate: false,
    };
    for t in grid {
        let tp = pos.len() - pos.partition_point(|&s| s < t);
        let fp = neg.len() - neg.partition_point(|&s| s < t);
        let f1 = prf_accuracy(&ConfusionCounts {
            tp,
            fp,
            fn_: pos.len() - tp,
            tn: neg.len() - fp,
        })
        .f1;
        if f1 > best.f1 {
            best.threshold = t;
            best.f1 = f1;
        }
    }
    Ok(best)
}

//! Scoring of paraphrase-detection predictions against gold splits.
//!
//! Paraphrase is the positive class throughout.

mod baseline;
mod bootstrap;
mod predictions;
mod report;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetSplit, Label};

pub use baseline::{jaccard_baseline, tune_threshold, ThresholdChoice};
pub use bootstrap::{bootstrap_ci, percentile};
pub use predictions::{read_predictions, write_predictions};
pub use report::{evaluate, render_report_table, EvalConfig, EvalReport, Interval};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EvalError {
    #[error("predictions do not cover the split: missing {missing:?}, extra {extra:?}")]
    Coverage { missing: Vec<String>, extra: Vec<String> },
    #[error("split is empty")]
    EmptySplit,
    #[error("split has no near-paraphrase pairs")]
    EmptySubset,
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{path}:{line}: {message}")]
    Malformed { path: String, line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionSet {
    pub model_id: String,
    pub entries: BTreeMap<String, Label>,
}

impl PredictionSet {
    pub fn new(model_id: impl Into<String>) -> Self {
        Self {
            model_id: model_id.into(),
            entries: BTreeMap::new(),
        }
    }

    /// Predict the same label for every pair of `split`.
    pub fn constant(model_id: impl Into<String>, split: &DatasetSplit, label: Label) -> Self {
        Self {
            model_id: model_id.into(),
            entries: split.pairs.iter().map(|p| (p.pair_id.clone(), label)).collect(),
        }
    }

    /// The gold labels of `split` as predictions.
    pub fn oracle(model_id: impl Into<String>, split: &DatasetSplit) -> Self {
        Self {
            model_id: model_id.into(),
            entries: split.pairs.iter().map(|p| (p.pair_id.clone(), p.label)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    F1,
    Accuracy,
    Recall,
    Precision,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::F1, Metric::Accuracy, Metric::Recall, Metric::Precision];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::F1 => "f1",
            Metric::Accuracy => "accuracy",
            Metric::Recall => "recall",
            Metric::Precision => "precision",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn add(&mut self, gold: Label, predicted: Label) {
        match (gold.is_paraphrase(), predicted.is_paraphrase()) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricValues {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    /// Metrics whose denominator was zero and were reported as 0.
    pub degenerate: Vec<Metric>,
}

impl MetricValues {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::F1 => self.f1,
            Metric::Accuracy => self.accuracy,
            Metric::Recall => self.recall,
            Metric::Precision => self.precision,
        }
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn prf_accuracy(c: &ConfusionCounts) -> MetricValues {
    let mut degenerate = Vec::new();
    let mut take = |metric, v: Option<f64>| {
        v.unwrap_or_else(|| {
            degenerate.push(metric);
            0.0
        })
    };
    let precision = take(Metric::Precision, ratio(c.tp, c.tp + c.fp));
    let recall = take(Metric::Recall, ratio(c.tp, c.tp + c.fn_));
    // 2PR/(P+R) == 2tp/(2tp+fp+fn); P+R is zero exactly when tp is
    let f1 = take(Metric::F1, ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_).filter(|_| c.tp > 0));
    let accuracy = take(Metric::Accuracy, ratio(c.tp + c.tn, c.total()));
    degenerate.sort();
    MetricValues {
        precision,
        recall,
        f1,
        accuracy,
        degenerate,
    }
}

/// One gold/prediction pair, sorted by pair id so results do not depend on
/// the split's row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Outcome {
    pub gold: Label,
    pub predicted: Label,
    pub near_paraphrase: bool,
}

pub(crate) fn align(preds: &PredictionSet, gold: &DatasetSplit) -> Result<Vec<Outcome>, EvalError> {
    let mut rows: Vec<(&str, Outcome)> = Vec::with_capacity(gold.pairs.len());
    let mut missing = Vec::new();
    for pair in &gold.pairs {
        match preds.entries.get(&pair.pair_id) {
            Some(&predicted) => rows.push((
                &pair.pair_id,
                Outcome {
                    gold: pair.label,
                    predicted,
                    near_paraphrase: pair.near_paraphrase,
                },
            )),
            None => missing.push(pair.pair_id.clone()),
        }
    }
    let extra: Vec<String> = if preds.entries.len() + missing.len() == gold.pairs.len() {
        Vec::new()
    } else {
        let ids: std::collections::HashSet<&str> = gold.pairs.iter().map(|p| p.pair_id.as_str()).collect();
        preds.entries.keys().filter(|k| !ids.contains(k.as_str())).cloned().collect()
    };
    if !missing.is_empty() || !extra.is_empty() {
        missing.sort();
        return Err(EvalError::Coverage { missing, extra });
    }
    rows.sort_by(|a, b| a.0.cmp(b.0));
    Ok(rows.into_iter().map(|(_, o)| o).collect())
}

pub(crate) fn count(outcomes: &[Outcome]) -> ConfusionCounts {
    let mut c = ConfusionCounts::default();
    for o in outcomes {
        c.add(o.gold, o.predicted);
    }
    c
}

pub fn confusion(preds: &PredictionSet, gold: &DatasetSplit) -> Result<ConfusionCounts, EvalError> {
    Ok(count(&align(preds, gold)?))
}

/// Fraction of gold near-paraphrase pairs predicted non-paraphrase.
pub fn near_paraphrase_accuracy(preds: &PredictionSet, gold: &DatasetSplit) -> Result<f64, EvalError> {
    let outcomes = align(preds, gold)?;
    near_accuracy(&outcomes).map(|(acc, _)| acc)
}

pub(crate) fn near_accuracy(outcomes: &[Outcome]) -> Result<(f64, usize), EvalError> {
    let near: Vec<&Outcome> = outcomes.iter().filter(|o| o.near_paraphrase).collect();
    if near.is_empty() {
        return Err(EvalError::EmptySubset);
    }
    let correct = near.iter().filter(|o| !o.predicted.is_paraphrase()).count();
    Ok((correct as f64 / near.len() as f64, near.len()))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::dataset::{LabeledPair, Origin, SplitName};

    /// A split with `pos` paraphrases followed by `neg` non-paraphrases.
    pub(crate) fn split(pos: usize, neg: usize) -> DatasetSplit {
        let pairs = (0..pos + neg)
            .map(|i| LabeledPair {
                pair_id: format!("p{i:05}"),
                sentence_1: format!("ա {i}"),
                sentence_2: format!("բ {i}"),
                label: Label::from_bit(i < pos),
                near_paraphrase: false,
                origin: Origin::External,
            })
            .collect();
        DatasetSplit {
            name: SplitName::Test,
            pairs,
            provenance: None,
        }
    }

    fn counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> ConfusionCounts {
        ConfusionCounts { tp, fp, fn_, tn }
    }

    #[test]
    fn hand_computed_metrics() {
        let m = prf_accuracy(&counts(3, 1, 2, 4));
        assert_eq!(m.precision, 0.75);
        assert_eq!(m.recall, 0.6);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(m.accuracy, 0.7);
        assert!(m.degenerate.is_empty());
    }

    #[test]
    fn degenerate_precision() {
        let m = prf_accuracy(&counts(0, 0, 3, 2));
        assert_eq!(m.precision, 0.0);
        assert_eq!(m.f1, 0.0);
        assert_eq!(m.degenerate, vec![Metric::F1, Metric::Precision]);
        let m = prf_accuracy(&counts(0, 2, 3, 0));
        assert_eq!(m.f1, 0.0);
        assert_eq!(m.degenerate, vec![Metric::F1]);
    }

    #[test]
    fn all_paraphrase_on_published_shape() {
        let gold = split(1021, 661);
        let preds = PredictionSet::constant("all", &gold, Label::Paraphrase);
        let c = confusion(&preds, &gold).unwrap();
        assert_eq!(c, counts(1021, 661, 0, 0));
        let m = prf_accuracy(&c);
        assert!((m.precision - 1021.0 / 1682.0).abs() < 1e-12);
        assert_eq!(m.recall, 1.0);
        assert!((m.f1 - 2042.0 / 2703.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_predictions() {
        let gold = split(5, 7);
        let c = confusion(&PredictionSet::oracle("gold", &gold), &gold).unwrap();
        assert_eq!((c.fp, c.fn_), (0, 0));
    }

    #[test]
    fn coverage_errors_list_ids() {
        let gold = split(2, 2);
        let mut preds = PredictionSet::constant("x", &gold, Label::Paraphrase);
        preds.entries.remove("p00001");
        preds.entries.insert("zz".into(), Label::Paraphrase);
        assert_eq!(
            confusion(&preds, &gold),
            Err(EvalError::Coverage {
                missing: vec!["p00001".into()],
                extra: vec!["zz".into()]
            })
        );
    }

    #[test]
    fn near_paraphrase_subset() {
        let mut gold = split(0, 30);
        for p in gold.pairs.iter_mut().take(22) {
            p.near_paraphrase = true;
        }
        let mut preds = PredictionSet::constant("x", &gold, Label::Paraphrase);
        assert_eq!(near_paraphrase_accuracy(&preds, &gold).unwrap(), 0.0);
        for id in ["p00003", "p00017"] {
            preds.entries.insert(id.into(), Label::NonParaphrase);
        }
        assert!((near_paraphrase_accuracy(&preds, &gold).unwrap() - 2.0 / 22.0).abs() < 1e-12);
        let all_neg = PredictionSet::constant("n", &gold, Label::NonParaphrase);
        assert_eq!(near_paraphrase_accuracy(&all_neg, &gold).unwrap(), 1.0);
        assert_eq!(
            near_paraphrase_accuracy(&PredictionSet::oracle("g", &split(2, 2)), &split(2, 2)),
            Err(EvalError::EmptySubset)
        );
    }
}

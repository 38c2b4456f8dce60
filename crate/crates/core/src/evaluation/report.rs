use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::bootstrap::bootstrap_intervals;
use super::{align, count, near_accuracy, prf_accuracy, ConfusionCounts, EvalError, Metric, PredictionSet};
use crate::dataset::DatasetSplit;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub n_resamples: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            n_resamples: 10_000,
            seed: 20_200_101,
            alpha: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub value: f64,
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model_id: String,
    pub n_pairs: usize,
    pub counts: ConfusionCounts,
    pub f1: Interval,
    pub accuracy: Interval,
    pub recall: Interval,
    pub precision: Interval,
    pub degenerate: Vec<Metric>,
    /// `None` when the gold split flags no near-paraphrase pairs.
    pub near_paraphrase_accuracy: Option<f64>,
    pub n_near_paraphrase: usize,
    pub n_resamples: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl EvalReport {
    pub fn interval(&self, metric: Metric) -> Interval {
        match metric {
            Metric::F1 => self.f1,
            Metric::Accuracy => self.accuracy,
            Metric::Recall => self.recall,
            Metric::Precision => self.precision,
        }
    }
}

pub fn evaluate(preds: &PredictionSet, gold: &DatasetSplit, cfg: &EvalConfig) -> Result<EvalReport, EvalError> {
    let outcomes = align(preds, gold)?;
    let counts = count(&outcomes);
    let values = prf_accuracy(&counts);
    let ci = bootstrap_intervals(&outcomes, &Metric::ALL, cfg.n_resamples, cfg.seed, cfg.alpha)?;
    let interval = |m: Metric| {
        let (low, high) = ci[&m];
        Interval {
            value: values.get(m),
            low,
            high,
        }
    };
    let (near, n_near) = match near_accuracy(&outcomes) {
        Ok((acc, n)) => (Some(acc), n),
        Err(EvalError::EmptySubset) => (None, 0),
        Err(e) => return Err(e),
    };
    Ok(EvalReport {
        model_id: preds.model_id.clone(),
        n_pairs: outcomes.len(),
        counts,
        f1: interval(Metric::F1),
        accuracy: interval(Metric::Accuracy),
        recall: interval(Metric::Recall),
        precision: interval(Metric::Precision),
        degenerate: values.degenerate,
        near_paraphrase_accuracy: near,
        n_near_paraphrase: n_near,
        n_resamples: cfg.n_resamples,
        seed: cfg.seed,
        alpha: cfg.alpha,
    })
}

/// One row per model: each metric with its interval, then near-paraphrase
/// accuracy.
pub fn render_report_table(reports: &[EvalReport]) -> String {
    let level = reports.first().map_or(95.0, |r| (1.0 - r.alpha) * 100.0);
    let width = reports.iter().map(|r| r.model_id.len()).max().unwrap_or(0).max(5);
    let mut out = String::new();
    let _ = writeln!(out, "Scores ({level:.0}% confidence interval)");
    let _ = write!(out, "{:<width$}", "Model");
    for m in Metric::ALL {
        let name = match m {
            Metric::F1 => "F1",
            Metric::Accuracy => "Accuracy",
            Metric::Recall => "Recall",
            Metric::Precision => "Precision",
        };
        let _ = write!(out, "  {name:<21}");
    }
    let _ = writeln!(out, "  Near-paraphrase");
    for r in reports {
        let _ = write!(out, "{:<width$}", r.model_id);
        for m in Metric::ALL {
            let i = r.interval(m);
            let cell = format!("{:.3} ({:.3}, {:.3})", i.value, i.low, i.high);
            let _ = write!(out, "  {cell:<21}");
        }
        match r.near_paraphrase_accuracy {
            Some(a) => {
                let _ = writeln!(out, "  {:.2}% (n={})", a * 100.0, r.n_near_paraphrase);
            }
            None => {
                let _ = writeln!(out, "  -");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Label;
    use crate::evaluation::tests::split;

    fn quick() -> EvalConfig {
        EvalConfig {
            n_resamples: 500,
            ..EvalConfig::default()
        }
    }

    #[test]
    fn gold_predictions_score_one() {
        let gold = split(30, 20);
        let r = evaluate(&PredictionSet::oracle("gold", &gold), &gold, &quick()).unwrap();
        for m in Metric::ALL {
            let i = r.interval(m);
            assert_eq!((i.value, i.low, i.high), (1.0, 1.0, 1.0), "{m}");
        }
        assert_eq!(r.near_paraphrase_accuracy, None);
    }

    #[test]
    fn intervals_bracket_values() {
        let gold = split(60, 40);
        let mut preds = PredictionSet::oracle("noisy", &gold);
        for i in (0..100).step_by(4) {
            preds.entries.insert(format!("p{i:05}"), Label::from_bit(i >= 60));
        }
        let r = evaluate(&preds, &gold, &quick()).unwrap();
        for m in Metric::ALL {
            let i = r.interval(m);
            assert!(i.low <= i.value && i.value <= i.high, "{m}: {i:?}");
            assert!(i.low >= 0.0 && i.high <= 1.0);
        }
        let table = render_report_table(&[r]);
        assert!(table.starts_with("Scores (95% confidence interval)\n"));
        assert!(table.lines().nth(2).unwrap().starts_with("noisy"));
    }
}

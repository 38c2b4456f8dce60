use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{align, count, prf_accuracy, ConfusionCounts, EvalError, Metric, Outcome, PredictionSet};
use crate::dataset::DatasetSplit;

/// Linear-interpolation quantile of an ascending slice.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (h - lo as f64)
}

/// Percentile bootstrap interval for `metric`. Resample `i` draws from its
/// own ChaCha stream of `seed`, so the result does not depend on threading.
pub fn bootstrap_ci(
    preds: &PredictionSet,
    gold: &DatasetSplit,
    metric: Metric,
    n_resamples: usize,
    seed: u64,
    alpha: f64,
) -> Result<(f64, f64), EvalError> {
    let outcomes = align(preds, gold)?;
    let intervals = bootstrap_intervals(&outcomes, &[metric], n_resamples, seed, alpha)?;
    Ok(intervals[&metric])
}

pub(crate) fn bootstrap_intervals(
    outcomes: &[Outcome],
    metrics: &[Metric],
    n_resamples: usize,
    seed: u64,
    alpha: f64,
) -> Result<BTreeMap<Metric, (f64, f64)>, EvalError> {
    if outcomes.is_empty() {
        return Err(EvalError::EmptySplit);
    }
    if n_resamples == 0 {
        return Err(EvalError::InvalidParameter("n_resamples must be positive".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(EvalError::InvalidParameter(format!("alpha {alpha} outside (0, 1)")));
    }
    // 0 = tp, 1 = fp, 2 = fn, 3 = tn
    let cells: Vec<u8> = outcomes
        .iter()
        .map(|o| match (o.gold.is_paraphrase(), o.predicted.is_paraphrase()) {
            (true, true) => 0,
            (false, true) => 1,
            (true, false) => 2,
            (false, false) => 3,
        })
        .collect();
    let n = cells.len();
    let resampled: Vec<ConfusionCounts> = (0..n_resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut k = [0usize; 4];
            for _ in 0..n {
                k[cells[rng.random_range(0..n)] as usize] += 1;
            }
            ConfusionCounts {
                tp: k[0],
                fp: k[1],
                fn_: k[2],
                tn: k[3],
            }
        })
        .collect();
    let values: Vec<_> = resampled.iter().map(prf_accuracy).collect();
    let point = prf_accuracy(&count(outcomes));

    let mut out = BTreeMap::new();
    for &metric in metrics {
        let mut v: Vec<f64> = values.iter().map(|m| m.get(metric)).collect();
        v.sort_by(f64::total_cmp);
        let p = point.get(metric);
        let low = percentile(&v, alpha / 2.0).min(p);
        let high = percentile(&v, 1.0 - alpha / 2.0).max(p);
        out.insert(metric, (low, high));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Label;
    use crate::evaluation::tests::split;

    #[test]
    fn percentile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 0.5), 3.0);
        assert_eq!(percentile(&v, 0.125), 1.5);
        assert_eq!(percentile(&v, 1.0), 5.0);
    }

    #[test]
    fn constant_statistic_has_zero_width() {
        let gold = split(40, 60);
        let preds = PredictionSet::oracle("gold", &gold);
        let ci = bootstrap_ci(&preds, &gold, Metric::Accuracy, 2000, 7, 0.05).unwrap();
        assert_eq!(ci, (1.0, 1.0));
    }

    #[test]
    fn seeded_and_order_invariant() {
        let gold = split(300, 200);
        let mut preds = PredictionSet::oracle("x", &gold);
        for i in (0..500).step_by(5) {
            preds.entries.insert(format!("p{i:05}"), Label::from_bit(i % 2 == 0));
        }
        let a = bootstrap_ci(&preds, &gold, Metric::F1, 1000, 42, 0.05).unwrap();
        let b = bootstrap_ci(&preds, &gold, Metric::F1, 1000, 42, 0.05).unwrap();
        assert_eq!(a, b);
        let mut reversed = gold.clone();
        reversed.pairs.reverse();
        assert_eq!(bootstrap_ci(&preds, &reversed, Metric::F1, 1000, 42, 0.05).unwrap(), a);
        let c = bootstrap_ci(&preds, &gold, Metric::F1, 1000, 43, 0.05).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn serial_matches_parallel() {
        let gold = split(50, 50);
        let mut preds = PredictionSet::oracle("x", &gold);
        preds.entries.insert("p00001".into(), Label::NonParaphrase);
        preds.entries.insert("p00070".into(), Label::Paraphrase);
        let outcomes = align(&preds, &gold).unwrap();
        let par = bootstrap_intervals(&outcomes, &[Metric::Accuracy], 500, 9, 0.05).unwrap();
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| bootstrap_intervals(&outcomes, &[Metric::Accuracy], 500, 9, 0.05).unwrap());
        assert_eq!(par, serial);
    }

    #[test]
    fn rejects_bad_parameters() {
        let gold = split(1, 1);
        let preds = PredictionSet::oracle("x", &gold);
        assert!(bootstrap_ci(&preds, &gold, Metric::F1, 0, 0, 0.05).is_err());
        assert!(bootstrap_ci(&preds, &gold, Metric::F1, 10, 0, 1.0).is_err());
        assert_eq!(
            bootstrap_ci(&PredictionSet::new("x"), &split(0, 0), Metric::F1, 10, 0, 0.05),
            Err(EvalError::EmptySplit)
        );
    }
}

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use paracorp::dataset::{import_tsv, SplitName};
use paracorp::evaluation::{
    evaluate, jaccard_baseline, read_predictions, render_report_table, tune_threshold, EvalReport, ThresholdChoice,
};

use crate::config::LoadedConfig;
use crate::store::{file_sha256, write_json};
use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct EvalOptions {
    pub gold: PathBuf,
    pub predictions: Option<PathBuf>,
    /// Score the Jaccard-threshold baseline instead of a predictions file.
    pub baseline: bool,
    pub threshold: Option<f64>,
    pub tune_on: Option<PathBuf>,
    pub model_id: Option<String>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutcome {
    pub config_sha256: String,
    pub gold_sha256: String,
    /// Baseline threshold applied to the gold split.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Set when the threshold was tuned on a training split.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuning: Option<ThresholdChoice>,
    pub report: EvalReport,
}

impl EvalOutcome {
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(t) = self.threshold {
            let _ = write!(out, "threshold {t:.4}");
            match &self.tuning {
                Some(c) if c.degenerate => out.push_str(" (single-label tuning split)"),
                Some(c) => {
                    let _ = write!(out, " (tuned, train F1 {:.4})", c.f1);
                }
                None => {}
            }
            out.push('\n');
        }
        out.push_str(&render_report_table(std::slice::from_ref(&self.report)));
        if !self.report.degenerate.is_empty() {
            let names: Vec<&str> = self.report.degenerate.iter().map(|m| m.as_str()).collect();
            let _ = writeln!(out, "zero denominator, reported as 0: {}", names.join(", "));
        }
        out
    }
}

pub fn eval(config: &LoadedConfig, opts: &EvalOptions) -> Result<EvalOutcome, CliError> {
    let cfg = &config.resolved;
    if opts.baseline && opts.threshold.is_some() == opts.tune_on.is_some() {
        return Err(CliError::Usage("--baseline needs exactly one of --threshold or --tune-on".into()));
    }
    if !opts.baseline && opts.predictions.is_none() {
        return Err(CliError::Usage("--predictions or --baseline is required".into()));
    }
    let gold = import_tsv(&opts.gold, SplitName::Test)?;
    let (preds, threshold, tuning) = if opts.baseline {
        let scorer = cfg.scorer()?;
        let (threshold, tuning) = match (opts.threshold, &opts.tune_on) {
            (Some(t), None) => (t, None),
            (None, Some(train)) => {
                let choice = tune_threshold(&import_tsv(train, SplitName::Train)?, &scorer)?;
                (choice.threshold, Some(choice))
            }
            _ => unreachable!("checked above"),
        };
        let mut preds = jaccard_baseline(&gold, threshold, &scorer)?;
        if let Some(id) = &opts.model_id {
            preds.model_id = id.clone();
        }
        (preds, Some(threshold), tuning)
    } else {
        let path = opts
            .predictions
            .as_ref()
            .ok_or_else(|| CliError::Usage("--predictions or --baseline is required".into()))?;
        let id = opts.model_id.clone().unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "predictions".into())
        });
        (read_predictions(path, &id)?, None, None)
    };
    let report = evaluate(&preds, &gold, &cfg.eval_config())?;
    let outcome = EvalOutcome {
        config_sha256: config.sha256.clone(),
        gold_sha256: file_sha256(&opts.gold)?,
        threshold,
        tuning,
        report,
    };
    if let Some(path) = &opts.report {
        write_json(path, &outcome)?;
    }
    Ok(outcome)
}

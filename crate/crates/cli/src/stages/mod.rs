mod annotate;
mod build;
mod eval;
mod generate;
mod prepare;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use paracorp::dataset::SplitName;

use crate::args::{Cli, Command};
use crate::config::LoadedConfig;
use crate::CliError;

pub use annotate::{annotate, enqueue_candidates, EnqueueSummary};
pub use build::{build, BuildSummary};
pub use eval::{eval, EvalOptions, EvalOutcome};
pub use generate::{generate, GenerateSummary};
pub use prepare::{prepare, PrepareSummary};

pub const PREPARE: &str = "prepare";
pub const GENERATE: &str = "generate";
pub const BUILD: &str = "build";

pub const SENTENCES_FILE: &str = "sentences.jsonl";
pub const DECISIONS_FILE: &str = "decisions.jsonl";
pub const PAIRS_FILE: &str = "pairs.jsonl";
pub const REPORT_FILE: &str = "report.json";
pub const TRAIN_TSV: &str = "train.tsv";
pub const TEST_TSV: &str = "test.tsv";
pub const STATS_TXT: &str = "stats.txt";
pub const STATS_JSONL: &str = "stats.jsonl";

/// Seeded train/test pool for each id. The first `round(n * test_fraction)`
/// ids of a seeded shuffle of the sorted ids go to the test pool.
pub fn assign_pools(ids: &[&str], test_fraction: f64, seed: u64) -> Result<BTreeMap<String, SplitName>, CliError> {
    if !(0.0..=1.0).contains(&test_fraction) {
        return Err(CliError::Usage(format!("build.test_fraction {test_fraction} outside [0, 1]")));
    }
    let mut sorted: Vec<&str> = ids.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sorted.shuffle(&mut rng);
    let n_test = (sorted.len() as f64 * test_fraction).round() as usize;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, id)| (id.to_string(), if i < n_test { SplitName::Test } else { SplitName::Train }))
        .collect())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let config = LoadedConfig::load(cli.config.as_deref(), cli.seed)?;
    match &cli.command {
        Command::Prepare => {
            let s = prepare(&config)?;
            print!("{}", s.render());
        }
        Command::Generate => {
            let s = generate(&config)?;
            print!("{}", s.render());
        }
        Command::Annotate { enqueue_only, port } => annotate(&config, *enqueue_only, *port)?,
        Command::Build => {
            let s = build(&config)?;
            print!("{}", s.stats_report);
        }
        Command::Eval {
            gold,
            predictions,
            baseline,
            threshold,
            tune_on,
            model_id,
            report,
        } => {
            let out = eval(
                &config,
                &EvalOptions {
                    gold: gold.clone(),
                    predictions: predictions.clone(),
                    baseline: baseline.is_some(),
                    threshold: *threshold,
                    tune_on: tune_on.clone(),
                    model_id: model_id.clone(),
                    report: report.clone(),
                },
            )?;
            print!("{}", out.render());
        }
    }
    Ok(())
}

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "paracorp", version, about = "Build and evaluate back-translated paraphrase corpora")]
pub struct Cli {
    /// Run configuration (TOML). Defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override every seed in the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load, segment and filter the raw corpus.
    Prepare,
    /// Back-translate kept sentences into candidate pairs.
    Generate,
    /// Queue candidates for annotation and serve the annotation API.
    Annotate {
        /// Register and assign new pairs, then exit without serving.
        #[arg(long)]
        enqueue_only: bool,
        /// Override `service.port`.
        #[arg(long)]
        port: Option<u16>,
    },
    /// Assemble train/test splits with negatives and write TSVs and stats.
    Build,
    /// Score predictions (or a baseline) against a gold TSV.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        /// `pair_id<TAB>label` file, label 1 = paraphrase.
        #[arg(long, required_unless_present = "baseline", conflicts_with = "baseline")]
        predictions: Option<PathBuf>,
        #[arg(long, value_enum)]
        baseline: Option<Baseline>,
        /// Fixed baseline threshold in [0, 1].
        #[arg(long, requires = "baseline", conflicts_with = "tune_on")]
        threshold: Option<f64>,
        /// Tune the baseline threshold on this TSV instead.
        #[arg(long, requires = "baseline")]
        tune_on: Option<PathBuf>,
        #[arg(long)]
        model_id: Option<String>,
        /// Also write the report as JSON here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Baseline {
    Jaccard,
}

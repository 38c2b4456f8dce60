//! The run configuration: one TOML file with a section per pipeline stage.
//! Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use paracorp::backtranslate::{GenerationConfig, ProviderSettings};
use paracorp::corpus_prep::{FilterConfig, IngestConfig, SegmenterConfig, Stopwords, Tokenizer};
use paracorp::dataset::NegativeQuotas;
use paracorp::evaluation::EvalConfig;
use paracorp::pair_metrics::{MetricsConfig, PairScorer};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StopwordsConfig {
    /// One word per line; the bundled Armenian list when unset.
    pub path: Option<PathBuf>,
}

/// Seeds of every randomized step. `--seed` overrides all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedsConfig {
    /// Train/test pool assignment of generated pairs and annotator assignment.
    pub assignment: u64,
    /// Negative pair sampling.
    pub negatives: u64,
    /// Row order of the assembled splits.
    pub split: u64,
    /// Bootstrap resampling in `eval`.
    pub bootstrap: u64,
}

impl Default for SeedsConfig {
    fn default() -> Self {
        Self {
            assignment: 1573,
            negatives: 2660,
            split: 4233,
            bootstrap: 1682,
        }
    }
}

impl SeedsConfig {
    pub fn all(seed: u64) -> Self {
        Self {
            assignment: seed,
            negatives: seed,
            split: seed,
            bootstrap: seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluationConfig {
    pub n_resamples: usize,
    pub alpha: f64,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        let d = EvalConfig::default();
        Self {
            n_resamples: d.n_resamples,
            alpha: d.alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ServiceConfig {
    pub host: String,
    /// 0 picks a free port.
    pub port: u16,
    /// Event log and snapshot; `<work_dir>/annotation` when unset.
    pub data_dir: Option<PathBuf>,
    pub annotators: Vec<String>,
    pub annotators_per_train_pair: usize,
    pub annotators_per_test_pair: usize,
    pub snapshot_every: u64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            host: "127.0.0.1".into(),
            port: 8077,
            data_dir: None,
            annotators: Vec::new(),
            annotators_per_train_pair: 1,
            annotators_per_test_pair: 2,
            snapshot_every: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivesSource {
    /// Finalized labels exported from the annotation log.
    #[default]
    Annotations,
    /// Every generated candidate taken as a paraphrase, without review.
    Unreviewed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BuildConfig {
    pub positives: PositivesSource,
    /// Share of generated pairs placed in the test pool.
    pub test_fraction: f64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            positives: PositivesSource::Annotations,
            test_fraction: 1382.0 / 2955.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsConfig {
    pub work_dir: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            work_dir: PathBuf::from("work"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub ingest: IngestConfig,
    pub segmenter: SegmenterConfig,
    pub filters: FilterConfig,
    pub stopwords: StopwordsConfig,
    pub provider: ProviderSettings,
    pub generation: GenerationConfig,
    pub negatives: NegativeQuotas,
    pub seeds: SeedsConfig,
    pub metrics: MetricsConfig,
    pub evaluation: EvaluationConfig,
    pub service: ServiceConfig,
    pub build: BuildConfig,
    pub paths: PathsConfig,
}

/// A parsed configuration together with the hash of its snapshot.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    /// As written (after `--seed`), before relative paths are resolved.
    pub snapshot: RunConfig,
    /// Relative paths made absolute against the config file's directory.
    pub resolved: RunConfig,
    pub sha256: String,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid configuration: {e}")))
    }

    pub fn snapshot_sha256(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.paths.work_dir);
        fix(&mut self.ingest.path);
        for p in [
            &mut self.stopwords.path,
            &mut self.provider.table_path,
            &mut self.provider.cache_dir,
            &mut self.service.data_dir,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    pub fn tokenizer(&self) -> Result<Tokenizer, CliError> {
        let stopwords = match &self.stopwords.path {
            Some(path) => Stopwords::from_file(path)?,
            None => Stopwords::armenian(),
        };
        Ok(Tokenizer::new(std::sync::Arc::new(stopwords)))
    }

    pub fn scorer(&self) -> Result<PairScorer, CliError> {
        Ok(PairScorer::new(self.tokenizer()?, self.metrics))
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            n_resamples: self.evaluation.n_resamples,
            seed: self.seeds.bootstrap,
            alpha: self.evaluation.alpha,
        }
    }

    pub fn annotation_dir(&self) -> PathBuf {
        self.service
            .data_dir
            .clone()
            .unwrap_or_else(|| self.paths.work_dir.join("annotation"))
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.provider
            .cache_dir
            .clone()
            .unwrap_or_else(|| self.paths.work_dir.join("cache"))
    }
}

impl LoadedConfig {
    /// Load `path` (defaults when `None`), apply the seed override and resolve
    /// relative paths against the file's directory (the working directory
    /// without a file).
    pub fn load(path: Option<&Path>, seed: Option<u64>) -> Result<Self, CliError> {
        let (mut config, base) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
                (RunConfig::parse(&text)?, base)
            }
            None => (RunConfig::default(), PathBuf::new()),
        };
        if let Some(seed) = seed {
            config.seeds = SeedsConfig::all(seed);
        }
        let sha256 = config.snapshot_sha256();
        let mut resolved = config.clone();
        let base = if base.as_os_str().is_empty() {
            std::env::current_dir().unwrap_or_default()
        } else {
            base
        };
        resolved.resolve_paths(&base);
        Ok(Self {
            snapshot: config,
            resolved,
            sha256,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(RunConfig::parse("[filters]\nmin_tokens = 3\n"), Err(CliError::Usage(_))));
        assert!(matches!(RunConfig::parse("[nope]\n"), Err(CliError::Usage(_))));
    }

    #[test]
    fn sections_parse() {
        let cfg = RunConfig::parse(
            r#"
            [negatives.train]
            consecutive = 10
            random = 12
            [seeds]
            negatives = 5
            [build]
            positives = "unreviewed"
            [provider]
            kind = "table"
            table_path = "tables.tsv"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.negatives.train.consecutive, 10);
        assert_eq!(cfg.negatives.test.random, 150);
        assert_eq!(cfg.seeds.negatives, 5);
        assert_eq!(cfg.seeds.split, 4233);
        assert_eq!(cfg.build.positives, PositivesSource::Unreviewed);
    }

    #[test]
    fn seed_override_changes_hash() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "[paths]\nwork_dir = \"out\"\n").unwrap();
        let a = LoadedConfig::load(Some(&path), None).unwrap();
        let b = LoadedConfig::load(Some(&path), Some(9)).unwrap();
        assert_ne!(a.sha256, b.sha256);
        assert_eq!(a.resolved.paths.work_dir, dir.path().join("out"));
        assert_eq!(a.snapshot.paths.work_dir, PathBuf::from("out"));
        assert_eq!(a.sha256, LoadedConfig::load(Some(&path), None).unwrap().sha256);
    }
}

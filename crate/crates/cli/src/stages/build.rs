use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use paracorp::annotation::AnnotationStore;
use paracorp::corpus_prep::Sentence;
use paracorp::dataset::{
    assemble_split, consecutive_negative_pairs, export_tsv, random_negative_pairs, render_diversity_table,
    render_stats_table, split_stats, Label, LabeledPair, Origin, Provenance, Quota, SplitName,
    SplitStats,
};

use super::annotate::{load_candidates, system_clock};
use super::{assign_pools, BUILD, PREPARE, SENTENCES_FILE, STATS_JSONL, STATS_TXT, TEST_TSV, TRAIN_TSV};
use crate::config::{LoadedConfig, PositivesSource};
use crate::store::{read_jsonl, write_jsonl, StageDir};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildSummary {
    pub train: SplitStats,
    pub test: SplitStats,
    pub stats_report: String,
}

fn positives(config: &LoadedConfig) -> Result<Vec<(SplitName, LabeledPair)>, CliError> {
    let cfg = &config.resolved;
    match cfg.build.positives {
        PositivesSource::Annotations => {
            let store = AnnotationStore::open(&cfg.annotation_dir(), system_clock(), 0)?;
            Ok(store
                .state()
                .export_adjudicated()?
                .into_iter()
                .map(|e| (e.pool, e.pair))
                .collect())
        }
        PositivesSource::Unreviewed => {
            log::warn!("build.positives = \"unreviewed\": every generated candidate is labeled paraphrase");
            let candidates = load_candidates(config)?;
            let ids: Vec<&str> = candidates.iter().map(|p| p.pair_id.as_str()).collect();
            let pools = assign_pools(&ids, cfg.build.test_fraction, cfg.seeds.assignment)?;
            Ok(candidates
                .into_iter()
                .map(|p| {
                    let pool = pools[&p.pair_id];
                    (
                        pool,
                        LabeledPair {
                            pair_id: p.pair_id,
                            sentence_1: p.source.text,
                            sentence_2: p.candidate_text,
                            label: Label::Paraphrase,
                            near_paraphrase: false,
                            origin: Origin::Backtranslation,
                        },
                    )
                })
                .collect())
        }
    }
}

fn negatives(
    sentences: &[Sentence],
    quota: Quota,
    seed: u64,
    exclude: &mut HashSet<(String, String)>,
    split: SplitName,
) -> Result<Vec<LabeledPair>, CliError> {
    let cons = consecutive_negative_pairs(sentences, quota.consecutive, seed, exclude, &format!("{split}-cons-"))?;
    exclude.extend(cons.iter().map(LabeledPair::key));
    let rand = random_negative_pairs(sentences, quota.random, seed ^ 0x5eed, exclude, &format!("{split}-rand-"))?;
    exclude.extend(rand.iter().map(LabeledPair::key));
    Ok(cons.into_iter().chain(rand).collect())
}

pub fn build(config: &LoadedConfig) -> Result<BuildSummary, CliError> {
    let cfg = &config.resolved;
    let prep = StageDir::new(&cfg.paths.work_dir, PREPARE);
    let sentences_path = prep.require(SENTENCES_FILE)?;
    let sentences: Vec<Sentence> = read_jsonl(&sentences_path)?;

    let mut pos_train = Vec::new();
    let mut pos_test = Vec::new();
    for (pool, pair) in positives(config)? {
        match pool {
            SplitName::Train => pos_train.push(pair),
            SplitName::Test => pos_test.push(pair),
        }
    }
    // negatives never repeat a positive pair or each other, across splits
    let mut exclude: HashSet<(String, String)> = pos_train.iter().chain(&pos_test).map(LabeledPair::key).collect();
    let neg_test = negatives(&sentences, cfg.negatives.test, cfg.seeds.negatives, &mut exclude, SplitName::Test)?;
    let neg_train = negatives(
        &sentences,
        cfg.negatives.train,
        cfg.seeds.negatives.wrapping_add(1),
        &mut exclude,
        SplitName::Train,
    )?;

    let provenance = Provenance {
        config_sha256: config.sha256.clone(),
        seed: cfg.seeds.split,
    };
    let train = assemble_split(SplitName::Train, pos_train, neg_train, provenance.clone())?;
    let test = assemble_split(SplitName::Test, pos_test, neg_test, provenance)?;

    let stage = StageDir::new(&cfg.paths.work_dir, BUILD);
    stage.create()?;
    for (split, name) in [(&train, TRAIN_TSV), (&test, TEST_TSV)] {
        let s = export_tsv(split, &stage.path(name))?;
        if s.sanitized_fields > 0 {
            log::warn!("{name}: {} fields had tabs or newlines replaced", s.sanitized_fields);
        }
    }

    let scorer = cfg.scorer()?;
    let (train_stats, test_stats) = (split_stats(&train, &scorer), split_stats(&test, &scorer));
    let report = stats_report(&[train_stats.clone(), test_stats.clone()]);
    std::fs::write(stage.path(STATS_TXT), &report)?;
    write_jsonl(&stage.path(STATS_JSONL), &[&train_stats, &test_stats])?;
    stage.write_manifest(config, &[&sentences_path], &[TRAIN_TSV, TEST_TSV, STATS_TXT, STATS_JSONL])?;
    Ok(BuildSummary {
        train: train_stats,
        test: test_stats,
        stats_report: report,
    })
}

pub fn stats_report(stats: &[SplitStats]) -> String {
    format!("{}\n{}", render_stats_table(stats), render_diversity_table(stats))
}


use std::io::Write as _;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use paracorp::annotation::{AnnotationStore, Clock};
use paracorp::backtranslate::{GeneratedPair, PairStatus};
use paracorp::dataset::SplitName;

use super::{assign_pools, GENERATE, PAIRS_FILE};
use crate::config::LoadedConfig;
use crate::store::{read_jsonl, StageDir};
use crate::CliError;

pub fn system_clock() -> Clock {
    Arc::new(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0)
    })
}

/// Candidates (status `candidate`) of the generate stage, by pair id.
pub(crate) fn load_candidates(config: &LoadedConfig) -> Result<Vec<GeneratedPair>, CliError> {
    let stage = StageDir::new(&config.resolved.paths.work_dir, GENERATE);
    let pairs: Vec<GeneratedPair> = read_jsonl(&stage.require(PAIRS_FILE)?)?;
    Ok(pairs.into_iter().filter(|p| p.status == PairStatus::Candidate).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnqueueSummary {
    pub new_train: usize,
    pub new_test: usize,
    pub tasks: usize,
}

/// Register candidates not yet known to the store and assign annotators.
pub fn enqueue_candidates(config: &LoadedConfig, store: &mut AnnotationStore) -> Result<EnqueueSummary, CliError> {
    let cfg = &config.resolved;
    let candidates = load_candidates(config)?;
    let ids: Vec<&str> = candidates.iter().map(|p| p.pair_id.as_str()).collect();
    let pools = assign_pools(&ids, cfg.build.test_fraction, cfg.seeds.assignment)?;

    let mut fresh: [Vec<(String, String, String)>; 2] = Default::default();
    for p in &candidates {
        if store.state().pair(&p.pair_id).is_some() {
            continue;
        }
        let slot = match pools[&p.pair_id] {
            SplitName::Train => 0,
            SplitName::Test => 1,
        };
        fresh[slot].push((p.pair_id.clone(), p.source.text.clone(), p.candidate_text.clone()));
    }
    let mut tasks = 0;
    if fresh.iter().any(|v| !v.is_empty()) && cfg.service.annotators.is_empty() {
        return Err(CliError::Usage("service.annotators is empty; list at least one annotator id".into()));
    }
    for (pool, batch, per_pair) in [
        (SplitName::Train, &fresh[0], cfg.service.annotators_per_train_pair),
        (SplitName::Test, &fresh[1], cfg.service.annotators_per_test_pair),
    ] {
        if batch.is_empty() {
            continue;
        }
        tasks += store
            .enqueue(batch, pool, &cfg.service.annotators, per_pair, cfg.seeds.assignment)?
            .len();
    }
    Ok(EnqueueSummary {
        new_train: fresh[0].len(),
        new_test: fresh[1].len(),
        tasks,
    })
}

pub fn annotate(config: &LoadedConfig, enqueue_only: bool, port: Option<u16>) -> Result<(), CliError> {
    let cfg = &config.resolved;
    let mut store = AnnotationStore::open(&cfg.annotation_dir(), system_clock(), cfg.service.snapshot_every)?;
    let summary = enqueue_candidates(config, &mut store)?;
    println!(
        "registered {} new pairs (train {}, test {}), {} new tasks",
        summary.new_train + summary.new_test,
        summary.new_train,
        summary.new_test,
        summary.tasks
    );
    if enqueue_only {
        store.compact()?;
        return Ok(());
    }

    let port = port.unwrap_or(cfg.service.port);
    let listener = std::net::TcpListener::bind((cfg.service.host.as_str(), port)).map_err(|e| {
        if e.kind() == std::io::ErrorKind::AddrInUse {
            CliError::Failed(format!(
                "port {port} on {} is already in use; pick another with --port or service.port",
                cfg.service.host
            ))
        } else {
            CliError::Failed(format!("cannot listen on {}:{port}: {e}", cfg.service.host))
        }
    })?;
    listener.set_nonblocking(true)?;
    let addr = listener.local_addr()?;
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    let store = paracorp_server::shared(store);
    let result = runtime.block_on(async {
        let listener = tokio::net::TcpListener::from_std(listener)?;
        println!("serving annotation API on http://{addr}");
        let _ = std::io::stdout().flush();
        paracorp_server::serve(listener, Arc::clone(&store), async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
    });
    let guard = store.lock().unwrap_or_else(|p| p.into_inner());
    guard.compact()?;
    result.map_err(CliError::from)
}

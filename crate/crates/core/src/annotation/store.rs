//! Durable annotation store: an append-only JSON-lines event log plus a
//! periodically compacted snapshot replaced atomically via rename.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::{AnnotationState, Event};
use super::{AdjudicatedLabel, AnnotationError, AnnotationRecord, AnnotationTask, PairInfo};
use crate::dataset::{Label, SplitName};

pub const EVENTS_FILE: &str = "events.jsonl";
pub const SNAPSHOT_FILE: &str = "snapshot.json";

/// Source of event timestamps (unix milliseconds).
pub type Clock = Arc<dyn Fn() -> u64 + Send + Sync>;

#[derive(Serialize, Deserialize)]
struct LogLine {
    seq: u64,
    #[serde(flatten)]
    event: Event,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    seq: u64,
    state: AnnotationState,
}

fn storage(context: &Path, e: impl std::fmt::Display) -> AnnotationError {
    AnnotationError::Storage(format!("{}: {e}", context.display()))
}

struct EventLog {
    dir: PathBuf,
    file: File,
}

impl EventLog {
    fn append(&mut self, seq: u64, event: &Event) -> Result<(), AnnotationError> {
        let mut line = serde_json::to_string(&LogLine {
            seq,
            event: event.clone(),
        })
        .expect("event serializes");
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.flush())
            .map_err(|e| storage(&self.dir, e))
    }

    fn snapshot(&self, state: &AnnotationState) -> Result<(), AnnotationError> {
        let tmp = self.dir.join(format!("{SNAPSHOT_FILE}.tmp"));
        let json = serde_json::to_vec(&Snapshot {
            seq: state.events_applied(),
            state: state.clone(),
        })
        .expect("snapshot serializes");
        let mut f = File::create(&tmp).map_err(|e| storage(&tmp, e))?;
        f.write_all(&json).and_then(|_| f.sync_all()).map_err(|e| storage(&tmp, e))?;
        fs::rename(&tmp, self.dir.join(SNAPSHOT_FILE)).map_err(|e| storage(&self.dir, e))
    }
}

/// The annotation service state with its persistence.
///
/// Writes go through `&mut self`; callers that share the store across
/// threads wrap it in a lock, which serializes all log appends.
pub struct AnnotationStore {
    state: AnnotationState,
    log: Option<EventLog>,
    clock: Clock,
    snapshot_every: u64,
}

impl AnnotationStore {
    pub fn in_memory(clock: Clock) -> Self {
        Self {
            state: AnnotationState::default(),
            log: None,
            clock,
            snapshot_every: 0,
        }
    }

    /// Open the store in `dir`, restoring the latest snapshot and replaying
    /// later log entries. A torn trailing line is truncated away.
    pub fn open(dir: &Path, clock: Clock, snapshot_every: u64) -> Result<Self, AnnotationError> {
        fs::create_dir_all(dir).map_err(|e| storage(dir, e))?;
        let snap_path = dir.join(SNAPSHOT_FILE);
        let mut state = if snap_path.exists() {
            let bytes = fs::read(&snap_path).map_err(|e| storage(&snap_path, e))?;
            let snap: Snapshot = serde_json::from_slice(&bytes).map_err(|e| storage(&snap_path, e))?;
            snap.state
        } else {
            AnnotationState::default()
        };

        let log_path = dir.join(EVENTS_FILE);
        if log_path.exists() {
            truncate_torn_tail(&log_path)?;
            let file = File::open(&log_path).map_err(|e| storage(&log_path, e))?;
            for (n, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| storage(&log_path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry: LogLine = serde_json::from_str(&line)
                    .map_err(|e| storage(&log_path, format!("line {}: {e}", n + 1)))?;
                if entry.seq < state.events_applied() {
                    continue;
                }
                if entry.seq != state.events_applied() {
                    return Err(storage(
                        &log_path,
                        format!("line {}: expected seq {}, found {}", n + 1, state.events_applied(), entry.seq),
                    ));
                }
                state
                    .validate(&entry.event)
                    .map_err(|e| storage(&log_path, format!("line {}: {e}", n + 1)))?;
                state.apply(entry.event);
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log_path)
            .map_err(|e| storage(&log_path, e))?;
        Ok(Self {
            state,
            log: Some(EventLog {
                dir: dir.to_path_buf(),
                file,
            }),
            clock,
            snapshot_every,
        })
    }

    pub fn state(&self) -> &AnnotationState {
        &self.state
    }

    fn now(&self) -> u64 {
        (self.clock)()
    }

    fn commit(&mut self, event: Event) -> Result<(), AnnotationError> {
        self.state.validate(&event)?;
        if let Some(log) = self.log.as_mut() {
            log.append(self.state.events_applied(), &event)?;
        }
        self.state.apply(event);
        if let Some(log) = &self.log {
            if self.snapshot_every > 0 && self.state.events_applied() % self.snapshot_every == 0 {
                log.snapshot(&self.state)?;
            }
        }
        Ok(())
    }

    /// Write a snapshot now (no-op for in-memory stores).
    pub fn compact(&self) -> Result<(), AnnotationError> {
        match &self.log {
            Some(log) => log.snapshot(&self.state),
            None => Ok(()),
        }
    }

    /// Register `pairs` in `pool` and assign each to `per_pair_count`
    /// distinct annotators, least-loaded first with seeded tie-breaking.
    pub fn enqueue(
        &mut self,
        pairs: &[(String, String, String)],
        pool: SplitName,
        annotators: &[String],
        per_pair_count: usize,
        seed: u64,
    ) -> Result<Vec<AnnotationTask>, AnnotationError> {
        let mut distinct = annotators.to_vec();
        distinct.sort();
        distinct.dedup();
        if per_pair_count == 0 || per_pair_count > distinct.len() {
            return Err(AnnotationError::Infeasible {
                requested: per_pair_count,
                available: distinct.len(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for (id, _, _) in pairs {
            if self.state.pair(id).is_some() || !seen.insert(id) {
                return Err(AnnotationError::DuplicatePair(id.clone()));
            }
        }

        let mut load: Vec<usize> = distinct.iter().map(|a| self.state.load(a)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut created = Vec::new();
        for (pair_id, s1, s2) in pairs {
            self.commit(Event::PairRegistered {
                pair: PairInfo {
                    pair_id: pair_id.clone(),
                    sentence_1: s1.clone(),
                    sentence_2: s2.clone(),
                    pool,
                    required: per_pair_count,
                },
            })?;
            let mut order: Vec<usize> = (0..distinct.len()).collect();
            order.shuffle(&mut rng);
            order.sort_by_key(|&i| load[i]);
            let mut chosen = order[..per_pair_count].to_vec();
            chosen.sort_unstable();
            for i in chosen {
                load[i] += 1;
                let task_id = self.state.next_task_id();
                let now = self.now();
                self.commit(Event::TaskAssigned {
                    task_id,
                    pair_id: pair_id.clone(),
                    annotator_id: distinct[i].clone(),
                    assigned_at: now,
                })?;
                created.push(self.state.task(pair_id, &distinct[i]).cloned().expect("just assigned"));
            }
        }
        Ok(created)
    }

    /// Record a judgment. `supersede` must be set to correct an earlier label.
    pub fn submit(
        &mut self,
        annotator_id: &str,
        pair_id: &str,
        sts_degree: u8,
        near_paraphrase: bool,
        supersede: bool,
    ) -> Result<AnnotationRecord, AnnotationError> {
        let previous = self
            .state
            .current_records(pair_id)
            .find(|r| r.annotator_id == annotator_id)
            .map_or(0, |r| r.revision);
        let revision = if supersede {
            if previous == 0 {
                return Err(AnnotationError::NothingToSupersede {
                    pair_id: pair_id.to_string(),
                    annotator_id: annotator_id.to_string(),
                });
            }
            previous + 1
        } else if previous > 0 {
            return Err(AnnotationError::DuplicateSubmission {
                pair_id: pair_id.to_string(),
                annotator_id: annotator_id.to_string(),
            });
        } else {
            1
        };
        let record = AnnotationRecord {
            pair_id: pair_id.to_string(),
            annotator_id: annotator_id.to_string(),
            sts_degree,
            near_paraphrase,
            submitted_at: self.now(),
            revision,
        };
        self.commit(Event::LabelSubmitted { record: record.clone() })?;
        Ok(record)
    }

    pub fn adjudicate(
        &mut self,
        adjudicator_id: &str,
        pair_id: &str,
        final_label: Label,
        near_paraphrase: bool,
    ) -> Result<AdjudicatedLabel, AnnotationError> {
        let at = self.now();
        self.commit(Event::Adjudicated {
            pair_id: pair_id.to_string(),
            adjudicator_id: adjudicator_id.to_string(),
            final_label,
            near_paraphrase,
            at,
        })?;
        Ok(self.state.adjudication(pair_id).cloned().expect("just adjudicated"))
    }
}

fn truncate_torn_tail(path: &Path) -> Result<(), AnnotationError> {
    let bytes = fs::read(path).map_err(|e| storage(path, e))?;
    if bytes.is_empty() || bytes.ends_with(b"\n") {
        return Ok(());
    }
    let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    log::warn!("{}: dropping torn final record ({} bytes)", path.display(), bytes.len() - keep);
    let f = OpenOptions::new().write(true).open(path).map_err(|e| storage(path, e))?;
    f.set_len(keep as u64).map_err(|e| storage(path, e))
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicU64, Ordering};

    use super::*;
    use crate::annotation::FinalizationMethod;

    pub(crate) fn counter_clock() -> Clock {
        let t = Arc::new(AtomicU64::new(1_000));
        Arc::new(move || t.fetch_add(1, Ordering::Relaxed))
    }

    fn pairs(n: usize) -> Vec<(String, String, String)> {
        (0..n)
            .map(|i| (format!("p{i}"), format!("source {i}"), format!("candidate {i}")))
            .collect()
    }

    fn ids(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn forced_assignment() {
        let mut store = AnnotationStore::in_memory(counter_clock());
        let tasks = store.enqueue(&pairs(4), SplitName::Test, &ids(&["a", "b"]), 2, 0).unwrap();
        assert_eq!(tasks.len(), 8);
        assert_eq!(store.state().load("a"), 4);
        assert_eq!(store.state().load("b"), 4);
    }

    #[test]
    fn balanced_single_assignment() {
        let mut store = AnnotationStore::in_memory(counter_clock());
        let tasks = store.enqueue(&pairs(4), SplitName::Train, &ids(&["a", "b"]), 1, 3).unwrap();
        assert_eq!(tasks.len(), 4);
        assert_eq!(store.state().load("a"), 2);
        assert_eq!(store.state().load("b"), 2);
    }

    #[test]
    fn infeasible_count() {
        let mut store = AnnotationStore::in_memory(counter_clock());
        let err = store.enqueue(&pairs(4), SplitName::Test, &ids(&["a", "b"]), 3, 0).unwrap_err();
        assert_eq!(err, AnnotationError::Infeasible { requested: 3, available: 2 });
    }

    #[test]
    fn submission_lifecycle() {
        let mut store = AnnotationStore::in_memory(counter_clock());
        store.enqueue(&pairs(1), SplitName::Test, &ids(&["a", "b"]), 2, 0).unwrap();
        store.submit("a", "p0", 5, false, false).unwrap();
        assert_eq!(store.state().task("p0", "a").unwrap().state, crate::annotation::TaskState::Done);
        assert!(matches!(
            store.submit("c", "p0", 5, false, false),
            Err(AnnotationError::NoSuchTask { .. })
        ));
        assert!(matches!(
            store.submit("a", "p0", 4, false, false),
            Err(AnnotationError::DuplicateSubmission { .. })
        ));
        assert!(matches!(
            store.submit("b", "p0", 4, true, false),
            Err(AnnotationError::NearParaphraseOnParaphrase)
        ));
        assert!(matches!(store.submit("b", "p0", 9, false, false), Err(AnnotationError::InvalidDegree(9))));
        store.submit("b", "p0", 2, false, false).unwrap();
        assert_eq!(store.state().disagreements(), vec!["p0".to_string()]);
    }

    #[test]
    fn agreeing_degrees_are_not_disagreements() {
        let mut store = AnnotationStore::in_memory(counter_clock());
        store.enqueue(&pairs(2), SplitName::Test, &ids(&["a", "b"]), 2, 0).unwrap();
        store.submit("a", "p0", 5, false, false).unwrap();
        store.submit("b", "p0", 4, false, false).unwrap();
        store.submit("a", "p1", 5, false, false).unwrap();
        store.submit("b", "p1", 3, false, false).unwrap();
        assert_eq!(store.state().disagreements(), vec!["p1".to_string()]);
    }

    #[test]
    fn adjudication_rules() {
        let mut store = AnnotationStore::in_memory(counter_clock());
        store.enqueue(&pairs(2), SplitName::Test, &ids(&["a", "b"]), 2, 0).unwrap();
        store.submit("a", "p0", 5, false, false).unwrap();
        store.submit("b", "p0", 3, true, false).unwrap();
        store.submit("a", "p1", 5, false, false).unwrap();
        store.submit("b", "p1", 5, false, false).unwrap();

        assert!(matches!(
            store.adjudicate("a", "p0", Label::Paraphrase, false),
            Err(AnnotationError::IdentityConflict { .. })
        ));
        assert_eq!(
            store.adjudicate("c", "p1", Label::Paraphrase, false),
            Err(AnnotationError::NotInDisagreement("p1".into()))
        );
        let adj = store.adjudicate("c", "p0", Label::NonParaphrase, true).unwrap();
        assert_eq!(adj.method, FinalizationMethod::Adjudicated);
        assert!(store.state().disagreements().is_empty());
        assert_eq!(
            store.adjudicate("d", "p0", Label::NonParaphrase, false),
            Err(AnnotationError::AlreadyAdjudicated("p0".into()))
        );
        assert!(matches!(
            store.submit("b", "p0", 5, false, true),
            Err(AnnotationError::AlreadyAdjudicated(_))
        ));
    }

    #[test]
    fn supersede_correction() {
        let mut store = AnnotationStore::in_memory(counter_clock());
        store.enqueue(&pairs(1), SplitName::Test, &ids(&["a", "b"]), 2, 0).unwrap();
        assert!(matches!(
            store.submit("a", "p0", 5, false, true),
            Err(AnnotationError::NothingToSupersede { .. })
        ));
        store.submit("a", "p0", 5, false, false).unwrap();
        store.submit("b", "p0", 1, false, false).unwrap();
        assert_eq!(store.state().disagreements().len(), 1);
        let fixed = store.submit("b", "p0", 4, false, true).unwrap();
        assert_eq!(fixed.revision, 2);
        assert!(store.state().disagreements().is_empty());
        assert_eq!(store.state().history().len(), 3);
        let fin = store.state().final_label("p0").unwrap();
        assert_eq!(fin.method, FinalizationMethod::Unanimous);
        assert_eq!(fin.final_label, Label::Paraphrase);
    }

    #[test]
    fn agreement_report_pairs() {
        let mut store = AnnotationStore::in_memory(counter_clock());
        let p = pairs(10);
        store.enqueue(&p, SplitName::Test, &ids(&["a", "b", "c"]), 3, 0).unwrap();
        // a and b: p_o = 0.8, p_e = 0.5
        let a = [5, 5, 5, 5, 0, 0, 0, 0, 5, 0];
        let b = [5, 5, 5, 5, 0, 0, 0, 0, 0, 5];
        for i in 0..10 {
            store.submit("a", &p[i].0, a[i], false, false).unwrap();
            store.submit("b", &p[i].0, b[i], false, false).unwrap();
            store.submit("c", &p[i].0, a[i], false, false).unwrap();
        }
        let report = store.state().agreement_report().unwrap();
        assert_eq!(report.len(), 3);
        let ab = &report[0];
        assert_eq!((ab.annotator_a.as_str(), ab.annotator_b.as_str()), ("a", "b"));
        assert!((ab.kappa.kappa - 0.6).abs() < 1e-12);
        let ac = &report[1];
        assert_eq!(ac.kappa.kappa, 1.0);
    }

    #[test]
    fn agreement_without_overlap_errors() {
        let mut store = AnnotationStore::in_memory(counter_clock());
        store.enqueue(&pairs(2), SplitName::Train, &ids(&["a", "b"]), 1, 0).unwrap();
        assert_eq!(store.state().agreement_report(), Err(AnnotationError::NoCoAnnotatedItems));
    }

    #[test]
    fn export_requires_finalization() {
        let mut store = AnnotationStore::in_memory(counter_clock());
        store.enqueue(&pairs(3), SplitName::Test, &ids(&["a", "b"]), 2, 0).unwrap();
        for (i, (da, db)) in [(5, 4), (2, 5), (1, 3)].into_iter().enumerate() {
            let id = format!("p{i}");
            store.submit("a", &id, da, da < 4 && i == 2, false).unwrap();
            store.submit("b", &id, db, false, false).unwrap();
        }
        assert_eq!(store.state().export_adjudicated(), Err(AnnotationError::Unfinalized(vec!["p1".into()])));
        store.adjudicate("c", "p1", Label::NonParaphrase, true).unwrap();
        let out = store.state().export_adjudicated().unwrap();
        let near: Vec<bool> = out.iter().map(|e| e.pair.near_paraphrase).collect();
        assert_eq!(near, vec![false, true, true]);
        assert_eq!(out[0].method, FinalizationMethod::Unanimous);
        assert_eq!(out[1].method, FinalizationMethod::Adjudicated);
        assert!(out.iter().all(|e| e.pool == SplitName::Test));
    }

    #[test]
    fn replay_reconstructs_state() {
        let dir = tempfile::tempdir().unwrap();
        let digest = {
            let mut store = AnnotationStore::open(dir.path(), counter_clock(), 4).unwrap();
            store.enqueue(&pairs(3), SplitName::Test, &ids(&["a", "b"]), 2, 11).unwrap();
            store.submit("a", "p0", 5, false, false).unwrap();
            store.submit("b", "p0", 0, false, false).unwrap();
            store.adjudicate("z", "p0", Label::Paraphrase, false).unwrap();
            store.submit("a", "p1", 3, true, false).unwrap();
            store.state().digest()
        };
        assert!(dir.path().join(SNAPSHOT_FILE).exists());
        let store = AnnotationStore::open(dir.path(), counter_clock(), 4).unwrap();
        assert_eq!(store.state().digest(), digest);

        // log alone, without the snapshot
        fs::remove_file(dir.path().join(SNAPSHOT_FILE)).unwrap();
        let store = AnnotationStore::open(dir.path(), counter_clock(), 0).unwrap();
        assert_eq!(store.state().digest(), digest);
    }

    #[test]
    fn torn_tail_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let digest = {
            let mut store = AnnotationStore::open(dir.path(), counter_clock(), 0).unwrap();
            store.enqueue(&pairs(1), SplitName::Train, &ids(&["a"]), 1, 0).unwrap();
            store.state().digest()
        };
        let mut f = OpenOptions::new().append(true).open(dir.path().join(EVENTS_FILE)).unwrap();
        f.write_all(b"{\"seq\":2,\"type\":\"label_sub").unwrap();
        drop(f);
        let mut store = AnnotationStore::open(dir.path(), counter_clock(), 0).unwrap();
        assert_eq!(store.state().digest(), digest);
        store.submit("a", "p0", 4, false, false).unwrap();
        let reopened = AnnotationStore::open(dir.path(), counter_clock(), 0).unwrap();
        assert_eq!(reopened.state().digest(), store.state().digest());
    }
}

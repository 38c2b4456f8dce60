//! Pure annotation state machine. Every mutation is an [`Event`]; the same
//! validation runs for live commands and for log replay.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{
    degree_to_label, AdjudicatedLabel, AnnotationError, AnnotationRecord, AnnotationTask, ExportedPair,
    FinalizationMethod, KappaReport, PairInfo, TaskState,
};
use crate::dataset::{Label, LabeledPair, Origin};
use crate::pair_metrics::cohens_kappa;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    PairRegistered {
        pair: PairInfo,
    },
    TaskAssigned {
        task_id: u64,
        pair_id: String,
        annotator_id: String,
        assigned_at: u64,
    },
    LabelSubmitted {
        record: AnnotationRecord,
    },
    Adjudicated {
        pair_id: String,
        adjudicator_id: String,
        final_label: Label,
        near_paraphrase: bool,
        at: u64,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationState {
    pairs: BTreeMap<String, PairInfo>,
    /// pair_id -> annotator_id -> task
    tasks: BTreeMap<String, BTreeMap<String, AnnotationTask>>,
    /// Latest revision per (pair, annotator).
    current: BTreeMap<String, BTreeMap<String, AnnotationRecord>>,
    /// Every record ever submitted, superseded ones included.
    history: Vec<AnnotationRecord>,
    adjudications: BTreeMap<String, AdjudicatedLabel>,
    /// annotator_id -> pending (task_id, pair_id)
    pending: BTreeMap<String, BTreeSet<(u64, String)>>,
    next_task_id: u64,
    events_applied: u64,
}

impl AnnotationState {
    pub fn events_applied(&self) -> u64 {
        self.events_applied
    }

    pub fn next_task_id(&self) -> u64 {
        self.next_task_id
    }

    /// SHA-256 over the canonical serialization; equal states, equal digests.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("state serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn pair(&self, pair_id: &str) -> Option<&PairInfo> {
        self.pairs.get(pair_id)
    }

    pub fn pairs(&self) -> impl Iterator<Item = &PairInfo> {
        self.pairs.values()
    }

    pub fn task(&self, pair_id: &str, annotator_id: &str) -> Option<&AnnotationTask> {
        self.tasks.get(pair_id)?.get(annotator_id)
    }

    pub fn tasks(&self) -> impl Iterator<Item = &AnnotationTask> {
        self.tasks.values().flat_map(|m| m.values())
    }

    pub fn history(&self) -> &[AnnotationRecord] {
        &self.history
    }

    pub fn current_records(&self, pair_id: &str) -> impl Iterator<Item = &AnnotationRecord> {
        self.current.get(pair_id).into_iter().flat_map(|m| m.values())
    }

    pub fn adjudication(&self, pair_id: &str) -> Option<&AdjudicatedLabel> {
        self.adjudications.get(pair_id)
    }

    /// Oldest pending task of an annotator.
    pub fn next_task(&self, annotator_id: &str) -> Option<&AnnotationTask> {
        let (_, pair_id) = self.pending.get(annotator_id)?.iter().next()?;
        self.task(pair_id, annotator_id)
    }

    pub fn pending_count(&self, annotator_id: &str) -> usize {
        self.pending.get(annotator_id).map_or(0, BTreeSet::len)
    }

    pub fn load(&self, annotator_id: &str) -> usize {
        self.tasks.values().filter(|m| m.contains_key(annotator_id)).count()
    }

    fn complete(&self, pair_id: &str) -> bool {
        let Some(info) = self.pairs.get(pair_id) else {
            return false;
        };
        self.current.get(pair_id).map_or(0, BTreeMap::len) >= info.required
    }

    fn labels(&self, pair_id: &str) -> BTreeSet<Label> {
        self.current_records(pair_id).map(AnnotationRecord::label).collect()
    }

    pub fn is_disagreement(&self, pair_id: &str) -> bool {
        self.complete(pair_id) && self.labels(pair_id).len() > 1 && !self.adjudications.contains_key(pair_id)
    }

    /// Complete, conflicting, unadjudicated pairs in id order.
    pub fn disagreements(&self) -> Vec<String> {
        self.pairs
            .keys()
            .filter(|id| self.is_disagreement(id))
            .cloned()
            .collect()
    }

    /// The final label, if the pair is unanimous or adjudicated. A unanimous
    /// non-paraphrase pair is near-paraphrase when any annotator flagged it.
    pub fn final_label(&self, pair_id: &str) -> Option<AdjudicatedLabel> {
        if let Some(adj) = self.adjudications.get(pair_id) {
            return Some(adj.clone());
        }
        if !self.complete(pair_id) {
            return None;
        }
        let labels = self.labels(pair_id);
        if labels.len() != 1 {
            return None;
        }
        let final_label = *labels.iter().next().unwrap();
        Some(AdjudicatedLabel {
            pair_id: pair_id.to_string(),
            final_label,
            near_paraphrase: final_label == Label::NonParaphrase
                && self.current_records(pair_id).any(|r| r.near_paraphrase),
            method: FinalizationMethod::Unanimous,
            adjudicator_id: None,
        })
    }

    pub fn unfinalized(&self) -> Vec<String> {
        self.pairs
            .keys()
            .filter(|id| self.final_label(id).is_none())
            .cloned()
            .collect()
    }

    pub fn export_adjudicated(&self) -> Result<Vec<ExportedPair>, AnnotationError> {
        let missing = self.unfinalized();
        if !missing.is_empty() {
            return Err(AnnotationError::Unfinalized(missing));
        }
        Ok(self
            .pairs
            .values()
            .map(|info| {
                let fin = self.final_label(&info.pair_id).expect("all finalized");
                ExportedPair {
                    pool: info.pool,
                    method: fin.method,
                    pair: LabeledPair {
                        pair_id: info.pair_id.clone(),
                        sentence_1: info.sentence_1.clone(),
                        sentence_2: info.sentence_2.clone(),
                        label: fin.final_label,
                        near_paraphrase: fin.near_paraphrase,
                        origin: Origin::Backtranslation,
                    },
                }
            })
            .collect())
    }

    /// Pairwise kappa on mapped binary labels over co-annotated pairs.
    /// Annotator pairs without shared items are omitted.
    pub fn agreement_report(&self) -> Result<Vec<KappaReport>, AnnotationError> {
        let annotators: BTreeSet<&str> = self
            .current
            .values()
            .flat_map(|m| m.keys().map(String::as_str))
            .collect();
        let annotators: Vec<&str> = annotators.into_iter().collect();
        let mut reports = Vec::new();
        for (i, a) in annotators.iter().enumerate() {
            for b in &annotators[i + 1..] {
                let (mut la, mut lb) = (Vec::new(), Vec::new());
                for records in self.current.values() {
                    if let (Some(ra), Some(rb)) = (records.get(*a), records.get(*b)) {
                        la.push(ra.label());
                        lb.push(rb.label());
                    }
                }
                if la.is_empty() {
                    continue;
                }
                let kappa = cohens_kappa(&la, &lb).expect("non-empty equal-length labels");
                reports.push(KappaReport {
                    annotator_a: a.to_string(),
                    annotator_b: b.to_string(),
                    kappa,
                });
            }
        }
        if reports.is_empty() {
            return Err(AnnotationError::NoCoAnnotatedItems);
        }
        Ok(reports)
    }

    pub fn validate(&self, event: &Event) -> Result<(), AnnotationError> {
        match event {
            Event::PairRegistered { pair } => {
                if self.pairs.contains_key(&pair.pair_id) {
                    return Err(AnnotationError::DuplicatePair(pair.pair_id.clone()));
                }
                if pair.required == 0 {
                    return Err(AnnotationError::Infeasible {
                        requested: 0,
                        available: 0,
                    });
                }
            }
            Event::TaskAssigned {
                pair_id, annotator_id, ..
            } => {
                if !self.pairs.contains_key(pair_id) {
                    return Err(AnnotationError::UnknownPair(pair_id.clone()));
                }
                if self.task(pair_id, annotator_id).is_some() {
                    return Err(AnnotationError::DuplicatePair(pair_id.clone()));
                }
            }
            Event::LabelSubmitted { record } => {
                degree_to_label(record.sts_degree)?;
                if record.near_paraphrase && record.sts_degree >= super::PARAPHRASE_MIN_DEGREE {
                    return Err(AnnotationError::NearParaphraseOnParaphrase);
                }
                let task = self
                    .task(&record.pair_id, &record.annotator_id)
                    .ok_or_else(|| AnnotationError::NoSuchTask {
                        pair_id: record.pair_id.clone(),
                        annotator_id: record.annotator_id.clone(),
                    })?;
                let previous = self
                    .current
                    .get(&record.pair_id)
                    .and_then(|m| m.get(&record.annotator_id))
                    .map_or(0, |r| r.revision);
                match (task.state, record.revision) {
                    (TaskState::Pending, 1) => {}
                    (TaskState::Pending, _) => {
                        return Err(AnnotationError::NothingToSupersede {
                            pair_id: record.pair_id.clone(),
                            annotator_id: record.annotator_id.clone(),
                        })
                    }
                    (TaskState::Done, r) if r == previous + 1 && r > 1 => {
                        if self.adjudications.contains_key(&record.pair_id) {
                            return Err(AnnotationError::AlreadyAdjudicated(record.pair_id.clone()));
                        }
                    }
                    (TaskState::Done, _) => {
                        return Err(AnnotationError::DuplicateSubmission {
                            pair_id: record.pair_id.clone(),
                            annotator_id: record.annotator_id.clone(),
                        })
                    }
                }
            }
            Event::Adjudicated {
                pair_id,
                adjudicator_id,
                final_label,
                near_paraphrase,
                ..
            } => {
                if !self.pairs.contains_key(pair_id) {
                    return Err(AnnotationError::UnknownPair(pair_id.clone()));
                }
                if *near_paraphrase && final_label.is_paraphrase() {
                    return Err(AnnotationError::NearParaphraseOnParaphrase);
                }
                if self.adjudications.contains_key(pair_id) {
                    return Err(AnnotationError::AlreadyAdjudicated(pair_id.clone()));
                }
                if !self.is_disagreement(pair_id) {
                    return Err(AnnotationError::NotInDisagreement(pair_id.clone()));
                }
                if self.tasks.get(pair_id).is_some_and(|m| m.contains_key(adjudicator_id)) {
                    return Err(AnnotationError::IdentityConflict {
                        pair_id: pair_id.clone(),
                        adjudicator_id: adjudicator_id.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Apply a validated event.
    pub fn apply(&mut self, event: Event) {
        match event {
            Event::PairRegistered { pair } => {
                self.pairs.insert(pair.pair_id.clone(), pair);
            }
            Event::TaskAssigned {
                task_id,
                pair_id,
                annotator_id,
                assigned_at,
            } => {
                self.pending
                    .entry(annotator_id.clone())
                    .or_default()
                    .insert((task_id, pair_id.clone()));
                self.tasks.entry(pair_id.clone()).or_default().insert(
                    annotator_id.clone(),
                    AnnotationTask {
                        task_id,
                        pair_id,
                        annotator_id,
                        state: TaskState::Pending,
                        assigned_at,
                    },
                );
                self.next_task_id = self.next_task_id.max(task_id + 1);
            }
            Event::LabelSubmitted { record } => {
                let task = self
                    .tasks
                    .get_mut(&record.pair_id)
                    .and_then(|m| m.get_mut(&record.annotator_id))
                    .expect("validated task");
                if task.state == TaskState::Pending {
                    task.state = TaskState::Done;
                    if let Some(set) = self.pending.get_mut(&record.annotator_id) {
                        set.remove(&(task.task_id, record.pair_id.clone()));
                        if set.is_empty() {
                            self.pending.remove(&record.annotator_id);
                        }
                    }
                }
                self.history.push(record.clone());
                self.current
                    .entry(record.pair_id.clone())
                    .or_default()
                    .insert(record.annotator_id.clone(), record);
            }
            Event::Adjudicated {
                pair_id,
                adjudicator_id,
                final_label,
                near_paraphrase,
                ..
            } => {
                self.adjudications.insert(
                    pair_id.clone(),
                    AdjudicatedLabel {
                        pair_id,
                        final_label,
                        near_paraphrase,
                        method: FinalizationMethod::Adjudicated,
                        adjudicator_id: Some(adjudicator_id),
                    },
                );
            }
        }
        self.events_applied += 1;
    }
}

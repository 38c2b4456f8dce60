//! Human annotation workflow: task assignment, STS-degree judgments,
//! disagreement detection, third-party adjudication and agreement
//! statistics, persisted as an append-only event log.

mod guideline;
mod state;
mod store;

use serde::{Deserialize, Serialize};

use crate::dataset::{Label, LabeledPair, SplitName};
use crate::pair_metrics::Kappa;

pub use guideline::GUIDELINE_MARKDOWN;
pub use state::{AnnotationState, Event};
pub use store::{AnnotationStore, Clock, EVENTS_FILE, SNAPSHOT_FILE};

pub const MAX_DEGREE: u8 = 5;
/// Lowest STS degree that counts as a paraphrase.
pub const PARAPHRASE_MIN_DEGREE: u8 = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnnotationError {
    #[error("STS degree {0} is outside 0..=5")]
    InvalidDegree(u8),
    #[error("cannot assign {requested} annotators per pair with only {available} annotators")]
    Infeasible { requested: usize, available: usize },
    #[error("pair {0} is already registered")]
    DuplicatePair(String),
    #[error("unknown pair {0}")]
    UnknownPair(String),
    #[error("no task for annotator {annotator_id} on pair {pair_id}")]
    NoSuchTask { pair_id: String, annotator_id: String },
    #[error("annotator {annotator_id} already labeled pair {pair_id}; submit a superseding correction instead")]
    DuplicateSubmission { pair_id: String, annotator_id: String },
    #[error("annotator {annotator_id} has no submitted label on pair {pair_id} to supersede")]
    NothingToSupersede { pair_id: String, annotator_id: String },
    #[error("pair {0} is already adjudicated")]
    AlreadyAdjudicated(String),
    #[error("near-paraphrase flag requires a non-paraphrase judgment")]
    NearParaphraseOnParaphrase,
    #[error("pair {0} is not in the disagreement queue")]
    NotInDisagreement(String),
    #[error("adjudicator {adjudicator_id} already annotated pair {pair_id}")]
    IdentityConflict { pair_id: String, adjudicator_id: String },
    #[error("no co-annotated items between any annotator pair")]
    NoCoAnnotatedItems,
    #[error("{} pairs are not finalized: {}", .0.len(), .0.join(", "))]
    Unfinalized(Vec<String>),
    #[error("record log: {0}")]
    Storage(String),
}

impl AnnotationError {
    /// Stable machine-readable code for API clients.
    pub fn code(&self) -> &'static str {
        match self {
            AnnotationError::InvalidDegree(_) => "invalid_degree",
            AnnotationError::Infeasible { .. } => "infeasible_assignment",
            AnnotationError::DuplicatePair(_) => "duplicate_pair",
            AnnotationError::UnknownPair(_) => "unknown_pair",
            AnnotationError::NoSuchTask { .. } => "no_such_task",
            AnnotationError::DuplicateSubmission { .. } => "duplicate_submission",
            AnnotationError::NothingToSupersede { .. } => "nothing_to_supersede",
            AnnotationError::AlreadyAdjudicated(_) => "already_adjudicated",
            AnnotationError::NearParaphraseOnParaphrase => "near_paraphrase_conflict",
            AnnotationError::NotInDisagreement(_) => "not_in_disagreement",
            AnnotationError::IdentityConflict { .. } => "adjudicator_conflict",
            AnnotationError::NoCoAnnotatedItems => "no_co_annotated_items",
            AnnotationError::Unfinalized(_) => "unfinalized_pairs",
            AnnotationError::Storage(_) => "storage_error",
        }
    }
}

/// Degrees 4 and 5 are paraphrases, 0 to 3 are not.
pub fn degree_to_label(sts_degree: u8) -> Result<Label, AnnotationError> {
    match sts_degree {
        d if d > MAX_DEGREE => Err(AnnotationError::InvalidDegree(d)),
        d if d >= PARAPHRASE_MIN_DEGREE => Ok(Label::Paraphrase),
        _ => Ok(Label::NonParaphrase),
    }
}

/// A pair offered for annotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairInfo {
    pub pair_id: String,
    pub sentence_1: String,
    pub sentence_2: String,
    pub pool: SplitName,
    /// Number of annotators assigned to the pair.
    pub required: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskState {
    Pending,
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationTask {
    pub task_id: u64,
    pub pair_id: String,
    pub annotator_id: String,
    pub state: TaskState,
    pub assigned_at: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub pair_id: String,
    pub annotator_id: String,
    pub sts_degree: u8,
    pub near_paraphrase: bool,
    pub submitted_at: u64,
    /// 1 for the first submission, incremented by each superseding correction.
    pub revision: u32,
}

impl AnnotationRecord {
    pub fn label(&self) -> Label {
        degree_to_label(self.sts_degree).expect("validated on submission")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalizationMethod {
    Unanimous,
    Adjudicated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjudicatedLabel {
    pub pair_id: String,
    pub final_label: Label,
    pub near_paraphrase: bool,
    pub method: FinalizationMethod,
    pub adjudicator_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaReport {
    pub annotator_a: String,
    pub annotator_b: String,
    #[serde(flatten)]
    pub kappa: Kappa,
}

/// Finalized pair together with its train/test pool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportedPair {
    pub pool: SplitName,
    pub method: FinalizationMethod,
    #[serde(flatten)]
    pub pair: LabeledPair,
}

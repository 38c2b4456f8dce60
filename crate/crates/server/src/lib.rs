//! HTTP/JSON API over an [`AnnotationStore`].
//!
//! Every handler takes the store lock for the duration of one command, so
//! writes reach the event log one at a time and reads see a consistent state.

use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use paracorp::annotation::{
    AnnotationError, AnnotationRecord, AnnotationStore, AnnotationTask, GUIDELINE_MARKDOWN,
};
use paracorp::dataset::Label;

pub type SharedStore = Arc<Mutex<AnnotationStore>>;

pub fn shared(store: AnnotationStore) -> SharedStore {
    Arc::new(Mutex::new(store))
}

/// Structured error body: `{code, message}` plus optional offending ids.
#[derive(Debug, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    status: u16,
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub pair_ids: Vec<String>,
}

impl ApiError {
    fn bad_request(message: String) -> Self {
        Self {
            status: 400,
            code: "bad_request".into(),
            message,
            pair_ids: Vec::new(),
        }
    }
}

impl From<AnnotationError> for ApiError {
    fn from(e: AnnotationError) -> Self {
        use AnnotationError::*;
        let status = match &e {
            InvalidDegree(_) | NearParaphraseOnParaphrase | Infeasible { .. } => 422,
            UnknownPair(_) | NoSuchTask { .. } => 404,
            DuplicatePair(_)
            | DuplicateSubmission { .. }
            | NothingToSupersede { .. }
            | AlreadyAdjudicated(_)
            | NotInDisagreement(_)
            | IdentityConflict { .. }
            | NoCoAnnotatedItems
            | Unfinalized(_) => 409,
            Storage(_) => 500,
        };
        let pair_ids = match &e {
            Unfinalized(ids) => ids.clone(),
            _ => Vec::new(),
        };
        Self {
            status,
            code: e.code().into(),
            message: e.to_string(),
            pair_ids,
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        Self::bad_request(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        Self::bad_request(r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn lock(store: &SharedStore) -> MutexGuard<'_, AnnotationStore> {
    // a panic mid-command leaves the state untouched (validate precedes apply)
    store.lock().unwrap_or_else(|p| p.into_inner())
}

#[derive(Deserialize)]
pub struct NextQuery {
    pub annotator: String,
}

#[derive(Serialize, Deserialize)]
pub struct TaskView {
    #[serde(flatten)]
    pub task: AnnotationTask,
    pub sentence_1: String,
    pub sentence_2: String,
}

#[derive(Serialize, Deserialize)]
pub struct NextTaskResponse {
    pub task: Option<TaskView>,
    pub remaining: usize,
}

async fn next_task(
    State(store): State<SharedStore>,
    query: Result<Query<NextQuery>, QueryRejection>,
) -> ApiResult<Json<NextTaskResponse>> {
    let Query(q) = query?;
    let store = lock(&store);
    let state = store.state();
    let task = state.next_task(&q.annotator).map(|t| {
        let pair = state.pair(&t.pair_id).expect("task refers to a registered pair");
        TaskView {
            task: t.clone(),
            sentence_1: pair.sentence_1.clone(),
            sentence_2: pair.sentence_2.clone(),
        }
    });
    Ok(Json(NextTaskResponse {
        task,
        remaining: state.pending_count(&q.annotator),
    }))
}

#[derive(Serialize, Deserialize)]
pub struct LabelRequest {
    pub pair_id: String,
    pub annotator_id: String,
    pub sts_degree: u8,
    pub near_paraphrase: bool,
    /// Set to replace an earlier submission by the same annotator.
    #[serde(default)]
    pub supersede: bool,
}

async fn submit_label(
    State(store): State<SharedStore>,
    body: Result<Json<LabelRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<AnnotationRecord>)> {
    let Json(req) = body?;
    let record = lock(&store).submit(
        &req.annotator_id,
        &req.pair_id,
        req.sts_degree,
        req.near_paraphrase,
        req.supersede,
    )?;
    Ok((StatusCode::CREATED, Json(record)))
}

#[derive(Serialize, Deserialize)]
pub struct Judgment {
    pub annotator_id: String,
    pub sts_degree: u8,
    pub label: Label,
    pub near_paraphrase: bool,
    pub revision: u32,
}

#[derive(Serialize, Deserialize)]
pub struct DisagreementView {
    pub pair_id: String,
    pub sentence_1: String,
    pub sentence_2: String,
    pub judgments: Vec<Judgment>,
}

async fn disagreements(State(store): State<SharedStore>) -> Json<Vec<DisagreementView>> {
    let store = lock(&store);
    let state = store.state();
    let views = state
        .disagreements()
        .into_iter()
        .map(|pair_id| {
            let pair = state.pair(&pair_id).expect("registered");
            DisagreementView {
                sentence_1: pair.sentence_1.clone(),
                sentence_2: pair.sentence_2.clone(),
                judgments: state
                    .current_records(&pair_id)
                    .map(|r| Judgment {
                        annotator_id: r.annotator_id.clone(),
                        sts_degree: r.sts_degree,
                        label: r.label(),
                        near_paraphrase: r.near_paraphrase,
                        revision: r.revision,
                    })
                    .collect(),
                pair_id,
            }
        })
        .collect();
    Json(views)
}

#[derive(Serialize, Deserialize)]
pub struct AdjudicationRequest {
    pub pair_id: String,
    pub adjudicator_id: String,
    pub final_label: Label,
    pub near_paraphrase: bool,
}

async fn adjudicate(
    State(store): State<SharedStore>,
    body: Result<Json<AdjudicationRequest>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let Json(req) = body?;
    let adj = lock(&store).adjudicate(&req.adjudicator_id, &req.pair_id, req.final_label, req.near_paraphrase)?;
    Ok((StatusCode::CREATED, Json(adj)))
}

async fn agreement(State(store): State<SharedStore>) -> ApiResult<impl IntoResponse> {
    let reports = lock(&store).state().agreement_report()?;
    Ok(Json(json!({ "reports": reports })))
}

async fn guideline() -> impl IntoResponse {
    Json(json!({ "format": "markdown", "content": GUIDELINE_MARKDOWN }))
}

async fn export(State(store): State<SharedStore>) -> ApiResult<impl IntoResponse> {
    let pairs = lock(&store).state().export_adjudicated()?;
    Ok(Json(pairs))
}

async fn status(State(store): State<SharedStore>) -> impl IntoResponse {
    let store = lock(&store);
    let state = store.state();
    Json(json!({
        "events": state.events_applied(),
        "digest": state.digest(),
        "pairs": state.pairs().count(),
        "disagreements": state.disagreements().len(),
        "unfinalized": state.unfinalized().len(),
    }))
}

async fn not_found() -> ApiError {
    ApiError {
        status: 404,
        code: "not_found".into(),
        message: "no such endpoint".into(),
        pair_ids: Vec::new(),
    }
}

pub fn router(store: SharedStore) -> Router {
    Router::new()
        .route("/api/tasks/next", get(next_task))
        .route("/api/labels", post(submit_label))
        .route("/api/disagreements", get(disagreements))
        .route("/api/adjudications", post(adjudicate))
        .route("/api/stats/agreement", get(agreement))
        .route("/api/guideline", get(guideline))
        .route("/api/export", get(export))
        .route("/api/status", get(status))
        .fallback(not_found)
        .with_state(store)
}

/// Serve until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    store: SharedStore,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        log::info!("annotation service listening on http://{addr}");
    }
    axum::serve(listener, router(store))
        .with_graceful_shutdown(shutdown)
        .await
}

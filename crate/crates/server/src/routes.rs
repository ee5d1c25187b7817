//! Route table and handlers. Handlers only translate between HTTP and the
//! engine; chemistry and search run on the blocking pool.

use std::path::Path;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;
use tower_http::trace::TraceLayer;

use therminfo_core::api::{
    ApiError, CasrnCheck, ErrorCode, IngestRequest, PredictionRequest, ReviewRequest, StructureQuery,
    SubmissionRequest, SubstructureQuery,
};
use therminfo_core::search::AdvancedFilters;
use therminfo_core::store::{validate_casrn, Decision};
use therminfo_core::Engine;

pub const ADMIN_TOKEN_HEADER: &str = "x-admin-token";

#[derive(Clone)]
pub struct AppState {
    pub engine: Arc<Engine>,
    pub admin_token: Option<Arc<str>>,
}

/// JSON error response carrying an [`ApiError`].
struct Failure(ApiError);

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        Failure(e)
    }
}

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.0.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self.0)).into_response()
    }
}

type Reply<T> = Result<Json<T>, Failure>;

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Reply<T> {
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map(Json).map_err(Failure),
        Err(e) => Err(Failure(ApiError::new(ErrorCode::Internal, e.to_string()))),
    }
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, Failure> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| Failure(ApiError::bad_request(e.body_text())))
}

fn constant_time_eq(a: &[u8], b: &[u8]) -> bool {
    a.len() == b.len() && a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
}

fn require_admin(state: &AppState, headers: &HeaderMap) -> Result<(), Failure> {
    let given = headers.get(ADMIN_TOKEN_HEADER).and_then(|v| v.to_str().ok());
    match (&state.admin_token, given) {
        (Some(expected), Some(given)) if constant_time_eq(expected.as_bytes(), given.as_bytes()) => Ok(()),
        _ => Err(Failure(ApiError::new(
            ErrorCode::Unauthorized,
            format!("missing or wrong {ADMIN_TOKEN_HEADER} header"),
        ))),
    }
}

#[derive(Debug, Serialize)]
struct Health {
    status: &'static str,
    compounds: usize,
}

async fn health(State(s): State<AppState>) -> Json<Health> {
    Json(Health {
        status: "ok",
        compounds: s.engine.stats().compounds,
    })
}

async fn compound(State(s): State<AppState>, UrlPath(id): UrlPath<String>) -> Reply<therminfo_core::store::CompoundRecord> {
    s.engine.compound(&id).map(Json).map_err(Failure)
}

async fn history(State(s): State<AppState>, UrlPath(id): UrlPath<String>) -> Reply<Vec<therminfo_core::store::HistoryEntry>> {
    blocking(move || {
        let entries = s.engine.history(&id);
        if entries.is_empty() {
            s.engine.compound(&id)?;
        }
        Ok(entries)
    })
    .await
}

#[derive(Debug, Deserialize)]
struct SearchParams {
    #[serde(default = "quick")]
    mode: String,
    q: String,
}

fn quick() -> String {
    "quick".into()
}

async fn search(
    State(s): State<AppState>,
    params: Result<Query<SearchParams>, QueryRejection>,
) -> Reply<therminfo_core::search::SearchResponse> {
    let Query(p) = params.map_err(|e| Failure(ApiError::bad_request(e.body_text()).with_field("q")))?;
    blocking(move || match p.mode.as_str() {
        "quick" => s.engine.quick(&p.q),
        "name" => s.engine.search_name(&p.q),
        "formula" => s.engine.search_formula(&p.q),
        "id" | "molecular_id" | "casrn" | "lookup" => Ok(s.engine.lookup(&p.q)),
        other => Err(ApiError::new(
            ErrorCode::InvalidQuery,
            format!("unknown search mode '{other}' (quick, name, formula, id, casrn)"),
        )
        .with_field("mode")),
    })
    .await
}

async fn search_advanced(
    State(s): State<AppState>,
    payload: Result<Json<AdvancedFilters>, JsonRejection>,
) -> Reply<therminfo_core::search::SearchResponse> {
    let filters = body(payload)?;
    blocking(move || s.engine.search_advanced(&filters)).await
}

async fn search_structure(
    State(s): State<AppState>,
    payload: Result<Json<StructureQuery>, JsonRejection>,
) -> Reply<therminfo_core::search::SearchResponse> {
    let q = body(payload)?;
    blocking(move || s.engine.search_structure(&q.smiles, q.threshold_percent)).await
}

async fn search_substructure(
    State(s): State<AppState>,
    payload: Result<Json<SubstructureQuery>, JsonRejection>,
) -> Reply<therminfo_core::search::SearchResponse> {
    let q = body(payload)?;
    blocking(move || s.engine.search_substructure(&q.smiles)).await
}

async fn predict(
    State(s): State<AppState>,
    payload: Result<Json<PredictionRequest>, JsonRejection>,
) -> Reply<therminfo_core::api::PredictionResponse> {
    let req = body(payload)?;
    blocking(move || s.engine.predict(&req)).await
}

async fn submit(
    State(s): State<AppState>,
    payload: Result<Json<SubmissionRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<therminfo_core::store::PendingSubmission>), Failure> {
    let req = body(payload)?;
    let sub = blocking(move || s.engine.submit(&req.compound, &req.submitter)).await?;
    Ok((StatusCode::CREATED, sub))
}

async fn submission(
    State(s): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Reply<therminfo_core::store::PendingSubmission> {
    s.engine.submission(&id).map(Json).map_err(Failure)
}

async fn stats(State(s): State<AppState>) -> Json<therminfo_core::store::StoreStats> {
    Json(s.engine.stats())
}

async fn casrn(UrlPath(casrn): UrlPath<String>) -> Json<CasrnCheck> {
    let valid = validate_casrn(&casrn);
    Json(CasrnCheck { casrn, valid })
}

async fn pending(State(s): State<AppState>, headers: HeaderMap) -> Reply<Vec<therminfo_core::store::PendingSubmission>> {
    require_admin(&s, &headers)?;
    Ok(Json(s.engine.pending()))
}

async fn review(
    s: AppState,
    headers: HeaderMap,
    id: String,
    decision: Decision,
    payload: Bytes,
) -> Reply<therminfo_core::store::PendingSubmission> {
    require_admin(&s, &headers)?;
    // The note is optional, so an empty body is allowed.
    let req: ReviewRequest = if payload.iter().all(u8::is_ascii_whitespace) {
        ReviewRequest::default()
    } else {
        serde_json::from_slice(&payload).map_err(|e| Failure(ApiError::bad_request(e.to_string()).with_field("note")))?
    };
    blocking(move || s.engine.review(&id, decision, req.note.as_deref())).await
}

async fn approve(
    State(s): State<AppState>,
    headers: HeaderMap,
    UrlPath(id): UrlPath<String>,
    payload: Bytes,
) -> Reply<therminfo_core::store::PendingSubmission> {
    review(s, headers, id, Decision::Approve, payload).await
}

async fn reject(
    State(s): State<AppState>,
    headers: HeaderMap,
    UrlPath(id): UrlPath<String>,
    payload: Bytes,
) -> Reply<therminfo_core::store::PendingSubmission> {
    review(s, headers, id, Decision::Reject, payload).await
}

async fn ingest(
    State(s): State<AppState>,
    headers: HeaderMap,
    payload: Result<Json<IngestRequest>, JsonRejection>,
) -> Reply<therminfo_core::store::IngestReport> {
    require_admin(&s, &headers)?;
    let req = body(payload)?;
    blocking(move || s.engine.ingest_text(&req)).await
}

async fn audit(State(s): State<AppState>, headers: HeaderMap) -> Reply<therminfo_core::store::AuditReport> {
    require_admin(&s, &headers)?;
    blocking(move || Ok(s.engine.audit())).await
}

async fn unknown_route() -> Failure {
    Failure(ApiError::new(ErrorCode::NotFound, "no such endpoint"))
}

/// The API under `/api`, plus the UI bundle under `/ui` when `ui_dir` is set.
pub fn router(state: AppState, ui_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/health", get(health))
        .route("/compounds/{id}", get(compound))
        .route("/compounds/{id}/history", get(history))
        .route("/search", get(search))
        .route("/search/advanced", post(search_advanced))
        .route("/search/structure", post(search_structure))
        .route("/search/substructure", post(search_substructure))
        .route("/predict", post(predict))
        .route("/submissions", post(submit))
        .route("/submissions/{id}", get(submission))
        .route("/stats", get(stats))
        .route("/casrn/{casrn}", get(casrn))
        .route("/admin/pending", get(pending))
        .route("/admin/pending/{id}/approve", post(approve))
        .route("/admin/pending/{id}/reject", post(reject))
        .route("/admin/ingest", post(ingest))
        .route("/admin/audit", get(audit))
        .fallback(unknown_route)
        .with_state(state);
    let mut app = Router::new().nest("/api", api);
    if let Some(dir) = ui_dir {
        let index = dir.join("index.html");
        app = app.nest_service(
            "/ui",
            ServeDir::new(dir).append_index_html_on_directories(true).fallback(tower_http::services::ServeFile::new(index)),
        );
    }
    app.layer(TraceLayer::new_for_http())
}

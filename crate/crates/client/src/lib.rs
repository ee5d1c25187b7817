//! Access to a therminfo store, either over HTTP or in process.
//!
//! [`Backend`] is implemented by [`HttpBackend`], a blocking client for the
//! service, and by [`therminfo_core::Engine`], so callers such as the
//! command line can work the same way with or without a server.

use std::path::Path;
use std::time::Duration;

use reqwest::blocking::{Client, RequestBuilder, Response};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use therminfo_core::api::{
    ApiError, DatasetFormat, IngestRequest, PredictionRequest, PredictionResponse, ReviewRequest, StructureQuery,
    SubmissionRequest, SubstructureQuery,
};
use therminfo_core::search::{AdvancedFilters, SearchResponse};
use therminfo_core::store::{
    AuditReport, CompoundInput, CompoundRecord, Decision, IngestReport, PendingSubmission, StoreStats,
};
use therminfo_core::Engine;

pub use therminfo_core::api::ErrorCode;

#[derive(Debug, Error)]
pub enum ClientError {
    /// The service (or engine) answered with an error.
    #[error("{} ({}): {}", .0.code.as_str(), .0.code.http_status(), .0.message)]
    Api(ApiError),
    #[error("cannot reach service: {0}")]
    Transport(String),
    #[error("unexpected response: {0}")]
    Protocol(String),
}

impl From<ApiError> for ClientError {
    fn from(e: ApiError) -> Self {
        ClientError::Api(e)
    }
}

impl ClientError {
    pub fn api(&self) -> Option<&ApiError> {
        match self {
            ClientError::Api(e) => Some(e),
            _ => None,
        }
    }
}

/// Text query modes reachable through `GET /api/search`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextMode {
    Quick,
    Name,
    Formula,
    Lookup,
}

impl TextMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TextMode::Quick => "quick",
            TextMode::Name => "name",
            TextMode::Formula => "formula",
            TextMode::Lookup => "id",
        }
    }
}

pub trait Backend {
    fn compound(&self, id: &str) -> Result<CompoundRecord, ClientError>;
    fn search_text(&self, mode: TextMode, q: &str) -> Result<SearchResponse, ClientError>;
    fn search_advanced(&self, filters: &AdvancedFilters) -> Result<SearchResponse, ClientError>;
    fn search_structure(&self, smiles: &str, threshold_percent: u32) -> Result<SearchResponse, ClientError>;
    fn search_substructure(&self, smiles: &str) -> Result<SearchResponse, ClientError>;
    fn predict(&self, req: &PredictionRequest) -> Result<PredictionResponse, ClientError>;
    fn submit(&self, compound: &CompoundInput, submitter: &str) -> Result<PendingSubmission, ClientError>;
    fn pending(&self) -> Result<Vec<PendingSubmission>, ClientError>;
    fn review(&self, id: &str, decision: Decision, note: Option<&str>) -> Result<PendingSubmission, ClientError>;
    fn stats(&self) -> Result<StoreStats, ClientError>;
    fn audit(&self) -> Result<AuditReport, ClientError>;
    fn ingest(&self, req: &IngestRequest) -> Result<IngestReport, ClientError>;

    /// Read a dataset file and ingest it; `.csv` files are CSV, anything
    /// else JSON lines.
    fn ingest_file(&self, path: &Path) -> Result<IngestReport, ClientError> {
        let content = std::fs::read_to_string(path)
            .map_err(|e| ClientError::Api(ApiError::new(ErrorCode::Io, format!("{}: {e}", path.display()))))?;
        let format = match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => DatasetFormat::Csv,
            _ => DatasetFormat::Jsonl,
        };
        self.ingest(&IngestRequest { format, content })
    }
}

impl Backend for Engine {
    fn compound(&self, id: &str) -> Result<CompoundRecord, ClientError> {
        Ok(Engine::compound(self, id)?)
    }

    fn search_text(&self, mode: TextMode, q: &str) -> Result<SearchResponse, ClientError> {
        Ok(match mode {
            TextMode::Quick => self.quick(q)?,
            TextMode::Name => Engine::search_name(self, q)?,
            TextMode::Formula => Engine::search_formula(self, q)?,
            TextMode::Lookup => self.lookup(q),
        })
    }

    fn search_advanced(&self, filters: &AdvancedFilters) -> Result<SearchResponse, ClientError> {
        Ok(Engine::search_advanced(self, filters)?)
    }

    fn search_structure(&self, smiles: &str, threshold_percent: u32) -> Result<SearchResponse, ClientError> {
        Ok(Engine::search_structure(self, smiles, threshold_percent)?)
    }

    fn search_substructure(&self, smiles: &str) -> Result<SearchResponse, ClientError> {
        Ok(Engine::search_substructure(self, smiles)?)
    }

    fn predict(&self, req: &PredictionRequest) -> Result<PredictionResponse, ClientError> {
        Ok(Engine::predict(self, req)?)
    }

    fn submit(&self, compound: &CompoundInput, submitter: &str) -> Result<PendingSubmission, ClientError> {
        Ok(Engine::submit(self, compound, submitter)?)
    }

    fn pending(&self) -> Result<Vec<PendingSubmission>, ClientError> {
        Ok(Engine::pending(self))
    }

    fn review(&self, id: &str, decision: Decision, note: Option<&str>) -> Result<PendingSubmission, ClientError> {
        Ok(Engine::review(self, id, decision, note)?)
    }

    fn stats(&self) -> Result<StoreStats, ClientError> {
        Ok(Engine::stats(self))
    }

    fn audit(&self) -> Result<AuditReport, ClientError> {
        Ok(Engine::audit(self))
    }

    fn ingest(&self, req: &IngestRequest) -> Result<IngestReport, ClientError> {
        Ok(self.ingest_text(req)?)
    }
}

/// Blocking HTTP client for a running service.
#[derive(Debug, Clone)]
pub struct HttpBackend {
    base: String,
    admin_token: Option<String>,
    http: Client,
}

impl HttpBackend {
    pub fn new(base_url: &str, admin_token: Option<String>) -> Result<Self, ClientError> {
        let http = Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        Ok(HttpBackend {
            base: base_url.trim_end_matches('/').to_string(),
            admin_token,
            http,
        })
    }

    fn url(&self, path: &str) -> String {
        format!("{}/api{path}", self.base)
    }

    fn admin(&self, req: RequestBuilder) -> RequestBuilder {
        match &self.admin_token {
            Some(t) => req.header("x-admin-token", t),
            None => req,
        }
    }

    fn send<T: DeserializeOwned>(&self, req: RequestBuilder) -> Result<T, ClientError> {
        let resp = req.send().map_err(|e| ClientError::Transport(e.to_string()))?;
        decode(resp)
    }

    fn get<T: DeserializeOwned>(&self, path: &str) -> Result<T, ClientError> {
        self.send(self.http.get(self.url(path)))
    }

    fn post<B: Serialize, T: DeserializeOwned>(&self, path: &str, body: &B) -> Result<T, ClientError> {
        self.send(self.http.post(self.url(path)).json(body))
    }
}

fn decode<T: DeserializeOwned>(resp: Response) -> Result<T, ClientError> {
    let status = resp.status();
    let bytes = resp.bytes().map_err(|e| ClientError::Transport(e.to_string()))?;
    if status.is_success() {
        serde_json::from_slice(&bytes).map_err(|e| ClientError::Protocol(e.to_string()))
    } else {
        match serde_json::from_slice::<ApiError>(&bytes) {
            Ok(e) => Err(ClientError::Api(e)),
            Err(_) => Err(ClientError::Protocol(format!(
                "status {status}: {}",
                String::from_utf8_lossy(&bytes)
            ))),
        }
    }
}

fn encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' | b'.' | b'~' => out.push(b as char),
            _ => out.push_str(&format!("%{b:02X}")),
        }
    }
    out
}

impl Backend for HttpBackend {
    fn compound(&self, id: &str) -> Result<CompoundRecord, ClientError> {
        self.get(&format!("/compounds/{}", encode(id)))
    }

    fn search_text(&self, mode: TextMode, q: &str) -> Result<SearchResponse, ClientError> {
        self.get(&format!("/search?mode={}&q={}", mode.as_str(), encode(q)))
    }

    fn search_advanced(&self, filters: &AdvancedFilters) -> Result<SearchResponse, ClientError> {
        self.post("/search/advanced", filters)
    }

    fn search_structure(&self, smiles: &str, threshold_percent: u32) -> Result<SearchResponse, ClientError> {
        self.post(
            "/search/structure",
            &StructureQuery {
                smiles: smiles.to_string(),
                threshold_percent,
            },
        )
    }

    fn search_substructure(&self, smiles: &str) -> Result<SearchResponse, ClientError> {
        self.post(
            "/search/substructure",
            &SubstructureQuery {
                smiles: smiles.to_string(),
            },
        )
    }

    fn predict(&self, req: &PredictionRequest) -> Result<PredictionResponse, ClientError> {
        self.post("/predict", req)
    }

    fn submit(&self, compound: &CompoundInput, submitter: &str) -> Result<PendingSubmission, ClientError> {
        self.post(
            "/submissions",
            &SubmissionRequest {
                submitter: submitter.to_string(),
                compound: compound.clone(),
            },
        )
    }

    fn pending(&self) -> Result<Vec<PendingSubmission>, ClientError> {
        self.send(self.admin(self.http.get(self.url("/admin/pending"))))
    }

    fn review(&self, id: &str, decision: Decision, note: Option<&str>) -> Result<PendingSubmission, ClientError> {
        let action = match decision {
            Decision::Approve => "approve",
            Decision::Reject => "reject",
        };
        let url = self.url(&format!("/admin/pending/{}/{action}", encode(id)));
        let body = ReviewRequest {
            note: note.map(str::to_string),
        };
        self.send(self.admin(self.http.post(url).json(&body)))
    }

    fn stats(&self) -> Result<StoreStats, ClientError> {
        self.get("/stats")
    }

    fn audit(&self) -> Result<AuditReport, ClientError> {
        self.send(self.admin(self.http.get(self.url("/admin/audit"))))
    }

    fn ingest(&self, req: &IngestRequest) -> Result<IngestReport, ClientError> {
        self.send(self.admin(self.http.post(self.url("/admin/ingest")).json(req)))
    }
}

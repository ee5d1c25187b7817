//! Request and response shapes shared by the HTTP service, its client and
//! the command line, plus the error type with stable machine codes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chem::ChemError;
use crate::elba::{DomainVerdict, ElbaCode};
use crate::search::{SearchError, SearchHit};
use crate::store::{Issue, StoreError};
use crate::thermo::{Phase, ThermoError, ThermoValue};

/// Stable machine codes carried by every API error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadRequest,
    InvalidStructure,
    InvalidQuery,
    InvalidThreshold,
    ValidationFailed,
    NotFound,
    Unauthorized,
    OutOfDomain,
    Conflict,
    AlreadyDecided,
    DuplicateId,
    Io,
    Internal,
}

impl ErrorCode {
    pub fn http_status(self) -> u16 {
        match self {
            ErrorCode::BadRequest
            | ErrorCode::InvalidStructure
            | ErrorCode::InvalidQuery
            | ErrorCode::InvalidThreshold
            | ErrorCode::ValidationFailed
            | ErrorCode::DuplicateId => 400,
            ErrorCode::Unauthorized => 401,
            ErrorCode::NotFound => 404,
            ErrorCode::Conflict | ErrorCode::AlreadyDecided => 409,
            ErrorCode::OutOfDomain => 422,
            ErrorCode::Io | ErrorCode::Internal => 500,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::BadRequest => "bad_request",
            ErrorCode::InvalidStructure => "invalid_structure",
            ErrorCode::InvalidQuery => "invalid_query",
            ErrorCode::InvalidThreshold => "invalid_threshold",
            ErrorCode::ValidationFailed => "validation_failed",
            ErrorCode::NotFound => "not_found",
            ErrorCode::Unauthorized => "unauthorized",
            ErrorCode::OutOfDomain => "out_of_domain",
            ErrorCode::Conflict => "conflict",
            ErrorCode::AlreadyDecided => "already_decided",
            ErrorCode::DuplicateId => "duplicate_id",
            ErrorCode::Io => "io",
            ErrorCode::Internal => "internal",
        }
    }
}

/// Error body: `{"code", "message", "field"?, "details"?}`.
#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
#[error("{message}")]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            code,
            message: message.into(),
            field: None,
            details: None,
        }
    }

    pub fn with_field(mut self, field: &str) -> Self {
        self.field = Some(field.to_string());
        self
    }

    pub fn with_details(mut self, details: impl Serialize) -> Self {
        self.details = serde_json::to_value(details).ok();
        self
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        ApiError::new(ErrorCode::NotFound, format!("no {what} with id {id}"))
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(ErrorCode::BadRequest, message)
    }

    pub fn structure(err: ChemError, field: &str) -> Self {
        let position = err.position();
        let e = ApiError::new(ErrorCode::InvalidStructure, err.to_string()).with_field(field);
        match position {
            Some(p) => e.with_details(serde_json::json!({ "position": p })),
            None => e,
        }
    }

    pub fn out_of_domain(verdict: &DomainVerdict) -> Self {
        let reasons: Vec<String> = verdict.reasons.iter().map(|r| r.to_string()).collect();
        ApiError::new(
            ErrorCode::OutOfDomain,
            format!("structure is outside the estimation domain: {}", reasons.join(", ")),
        )
        .with_details(verdict)
    }

    pub fn status(&self) -> u16 {
        self.code.http_status()
    }

    /// The domain verdict attached to an out-of-domain error.
    pub fn verdict(&self) -> Option<DomainVerdict> {
        if self.code != ErrorCode::OutOfDomain {
            return None;
        }
        serde_json::from_value(self.details.clone()?).ok()
    }
}

impl From<SearchError> for ApiError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Structure(c) => ApiError::structure(c, "smiles"),
            SearchError::Threshold(_) => ApiError::new(ErrorCode::InvalidThreshold, e.to_string()).with_field("threshold_percent"),
            SearchError::FormulaPattern(_) => ApiError::new(ErrorCode::InvalidQuery, e.to_string()).with_field("formula"),
            SearchError::UnknownCharacteristic(_) => {
                ApiError::new(ErrorCode::InvalidQuery, e.to_string()).with_field("characteristics")
            }
            _ => ApiError::new(ErrorCode::InvalidQuery, e.to_string()),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match &e {
            StoreError::Io(_) => ApiError::new(ErrorCode::Io, e.to_string()),
            StoreError::Format { .. } => ApiError::new(ErrorCode::Internal, e.to_string()),
            StoreError::DuplicateId { .. } => ApiError::new(ErrorCode::DuplicateId, e.to_string()).with_field("molecular_id"),
            StoreError::NotFound { .. } => ApiError::new(ErrorCode::NotFound, e.to_string()),
            StoreError::AlreadyDecided { .. } => ApiError::new(ErrorCode::AlreadyDecided, e.to_string()),
            StoreError::Conflict(_) => ApiError::new(ErrorCode::Conflict, e.to_string()),
            StoreError::Invalid(issues) => {
                let field = issues.first().and_then(|i| i.field.clone());
                let mut err = ApiError::new(ErrorCode::ValidationFailed, e.to_string()).with_details(issues);
                err.field = field;
                err
            }
        }
    }
}

impl From<ThermoError> for ApiError {
    fn from(e: ThermoError) -> Self {
        ApiError::new(ErrorCode::BadRequest, e.to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PredictionRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smiles: Option<String>,
    /// Resolved against stored names and synonyms when no SMILES is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub trans_ring_double_bonds: u32,
    /// Restrict estimates to one phase; both by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<Phase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryEcho {
    pub input: String,
    pub canonical_smiles: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub formula: String,
    pub weight: f64,
}

/// One row of the parameter table shown with a prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub code: ElbaCode,
    pub frequency: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentalValues {
    pub molecular_id: String,
    pub name: String,
    pub values: Vec<ThermoValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionResponse {
    pub query: QueryEcho,
    /// Stored compounds with the same molecular formula.
    pub isomers: Vec<SearchHit>,
    pub estimates: Vec<ThermoValue>,
    pub features: Vec<FeatureRow>,
    /// Present iff a stored compound has the same canonical structure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experimental: Option<ExperimentalValues>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureQuery {
    pub smiles: String,
    #[serde(default = "default_threshold")]
    pub threshold_percent: u32,
}

fn default_threshold() -> u32 {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstructureQuery {
    pub smiles: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmissionRequest {
    pub submitter: String,
    pub compound: crate::store::CompoundInput,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReviewRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CasrnCheck {
    pub casrn: String,
    pub valid: bool,
}

/// Field-level reasons carried by a `validation_failed` error.
pub fn issues_of(err: &ApiError) -> Vec<Issue> {
    err.details
        .clone()
        .and_then(|d| serde_json::from_value(d).ok())
        .unwrap_or_default()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    #[default]
    Jsonl,
    Csv,
}

/// A dataset sent inline for ingest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestRequest {
    #[serde(default)]
    pub format: DatasetFormat,
    pub content: String,
}

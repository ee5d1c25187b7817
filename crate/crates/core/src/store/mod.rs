//! Compound records, dataset ingest, user submissions with admin review,
//! statistics and audit, persisted as an append-only JSON-lines event log.
//!
//! Each line of the log is one event (`upsert`, `delete`, `submit`,
//! `review`). Opening a store replays the log; every write appends its
//! events before it is applied in memory, so replaying always reproduces
//! the live state.

mod dataset;
mod record;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chem::{canonical_smiles, molecular_formula, molecular_weight, parse_smiles, MolecularFormula};
use crate::search::derive_characteristics;
use crate::thermo::{consistency_check, Finding, ThermoKind};

pub use dataset::{parse_csv, parse_jsonl, read_dataset, DatasetRow};
pub use record::{
    format_molecular_id, is_molecular_id, normalize_characteristic, validate_casrn, CompoundInput,
    CompoundRecord, PhysicalState, CHARACTERISTICS,
};

/// Largest tolerated difference between a declared and a computed
/// molecular weight, g/mol.
pub const WEIGHT_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StoreError {
    #[error("{0}")]
    Io(String),
    #[error("store log line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("molecular id {id} appears on lines {first} and {second} of the dataset")]
    DuplicateId { id: String, first: usize, second: usize },
    #[error("no {what} with id {id}")]
    NotFound { what: &'static str, id: String },
    #[error("submission {id} was already {status}")]
    AlreadyDecided { id: String, status: SubmissionStatus },
    #[error("{0}")]
    Conflict(String),
    #[error("invalid record: {}", .0.iter().map(|i| i.message.as_str()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Issue>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IssueCode {
    Unreadable,
    MissingField,
    Structure,
    FormulaMismatch,
    WeightMismatch,
    InvalidCasrn,
    InvalidId,
    InvalidValue,
    UnknownCharacteristic,
    Redundant,
    IdConflict,
}

/// A validation problem tied to a record field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub code: IssueCode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub message: String,
}

impl Issue {
    fn new(code: IssueCode, field: &str, message: impl Into<String>) -> Self {
        Issue {
            code,
            field: Some(field.to_string()),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Accepted,
    Duplicate,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowOutcome {
    pub line: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub molecular_id: Option<String>,
    pub name: String,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub issues: Vec<Issue>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub accepted: usize,
    pub duplicates: usize,
    pub rejected: usize,
    pub rows: Vec<RowOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubmissionStatus {
    Pending,
    Approved,
    Rejected,
}

impl std::fmt::Display for SubmissionStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SubmissionStatus::Pending => "pending",
            SubmissionStatus::Approved => "approved",
            SubmissionStatus::Rejected => "rejected",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Approve,
    Reject,
}

/// A user-contributed compound awaiting review. `payload.molecular_id` is
/// empty until approval assigns one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PendingSubmission {
    pub id: String,
    pub submitter: String,
    pub submitted_at: String,
    pub status: SubmissionStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reviewer_note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reviewed_at: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub molecular_id: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub payload: CompoundRecord,
}

/// A review outcome, kept for reporting back to the submitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewNotice {
    pub submission_id: String,
    pub submitter: String,
    pub decision: Decision,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub molecular_id: Option<String>,
    pub at: String,
}

/// A superseded or deleted record version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub retired_at: String,
    pub reason: String,
    pub record: CompoundRecord,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormationCounts {
    pub cr: usize,
    pub l: usize,
    pub g: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseChangeCounts {
    pub fus: usize,
    pub vap: usize,
    pub sub: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreStats {
    pub compounds: usize,
    pub synonyms: usize,
    pub casrn: usize,
    pub classes: usize,
    pub subclasses: usize,
    pub families: usize,
    pub formation: FormationCounts,
    pub phase_change: PhaseChangeCounts,
    pub pending_submissions: usize,
    pub history_entries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditProblem {
    pub molecular_id: String,
    pub issue: Issue,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checked: usize,
    pub problems: Vec<AuditProblem>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.problems.is_empty()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
enum Event {
    Upsert {
        at: String,
        reason: String,
        record: CompoundRecord,
    },
    Delete {
        at: String,
        molecular_id: String,
    },
    Submit {
        submission: PendingSubmission,
    },
    Review {
        at: String,
        submission_id: String,
        decision: Decision,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        note: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        molecular_id: Option<String>,
    },
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn id_number(id: &str) -> u32 {
    id[1..].parse().unwrap_or(0)
}

/// A validated record plus non-fatal remarks.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub record: CompoundRecord,
    pub warnings: Vec<String>,
}

/// Check a candidate and derive its structural fields. Every problem found
/// is reported, not just the first.
pub fn prepare(input: &CompoundInput) -> Result<Prepared, Vec<Issue>> {
    let mut issues = Vec::new();
    let mut warnings = Vec::new();

    if input.name.trim().is_empty() {
        issues.push(Issue::new(IssueCode::MissingField, "name", "name is required"));
    }
    if let Some(id) = &input.molecular_id {
        if !is_molecular_id(id) {
            issues.push(Issue::new(
                IssueCode::InvalidId,
                "molecular_id",
                format!("'{id}' is not 'C' followed by six digits"),
            ));
        }
    }
    if let Some(c) = &input.casrn {
        if !validate_casrn(c) {
            issues.push(Issue::new(
                IssueCode::InvalidCasrn,
                "casrn",
                format!("'{c}' fails the CAS registry number check"),
            ));
        }
    }

    let mut derived = None;
    if input.smiles.trim().is_empty() {
        issues.push(Issue::new(IssueCode::MissingField, "smiles", "smiles is required"));
    } else {
        match parse_smiles(input.smiles.trim()) {
            Err(e) => issues.push(Issue::new(IssueCode::Structure, "smiles", e.to_string())),
            Ok(mol) => derived = Some(mol),
        }
    }

    let mut characteristics = BTreeSet::new();
    for tag in &input.characteristics {
        match normalize_characteristic(tag) {
            Some(t) => {
                characteristics.insert(t.to_string());
            }
            None => issues.push(Issue::new(
                IssueCode::UnknownCharacteristic,
                "characteristics",
                format!("'{tag}' is not a known characteristic"),
            )),
        }
    }

    let mut seen_kinds = BTreeSet::new();
    for t in &input.thermo {
        if !t.value.is_finite() || t.uncertainty.is_some_and(|u| !u.is_finite() || u < 0.0) {
            issues.push(Issue::new(
                IssueCode::InvalidValue,
                "thermo",
                format!("{} must be finite with a non-negative uncertainty", t.kind),
            ));
        }
        if !seen_kinds.insert(t.kind) {
            issues.push(Issue::new(IssueCode::InvalidValue, "thermo", format!("{} given twice", t.kind)));
        }
    }

    let (formula, weight, usmiles) = match &derived {
        Some(mol) => {
            let formula = molecular_formula(mol);
            let weight = molecular_weight(mol);
            if let Some(declared) = &input.formula {
                match declared.parse::<MolecularFormula>() {
                    Ok(f) if f == formula => {}
                    Ok(f) => issues.push(Issue::new(
                        IssueCode::FormulaMismatch,
                        "formula",
                        format!("declared formula {f} but the structure is {formula}"),
                    )),
                    Err(e) => issues.push(Issue::new(IssueCode::FormulaMismatch, "formula", e.to_string())),
                }
            }
            if let Some(w) = input.weight {
                if !w.is_finite() || (w - weight).abs() > WEIGHT_TOLERANCE {
                    issues.push(Issue::new(
                        IssueCode::WeightMismatch,
                        "weight",
                        format!("declared weight {w} but the structure weighs {weight:.3}"),
                    ));
                }
            }
            let usmiles = canonical_smiles(mol);
            if let Some(declared) = &input.usmiles {
                let same = parse_smiles(declared).map(|m| canonical_smiles(&m) == usmiles).unwrap_or(false);
                if !same {
                    warnings.push(format!("declared usmiles '{declared}' replaced by '{usmiles}'"));
                }
            }
            characteristics.extend(derive_characteristics(mol));
            (formula, weight, usmiles)
        }
        None => (MolecularFormula::default(), 0.0, String::new()),
    };

    for f in consistency_check(&input.thermo) {
        if let Finding::Check {
            identity,
            residual,
            combined_uncertainty,
            consistent: false,
            ..
        } = f
        {
            warnings.push(format!(
                "{identity:?} off by {residual:.1} kJ/mol (combined uncertainty {combined_uncertainty:.1})"
            ));
        }
    }

    if !issues.is_empty() {
        return Err(issues);
    }
    let record = CompoundRecord {
        molecular_id: input.molecular_id.clone().unwrap_or_default(),
        name: input.name.trim().to_string(),
        synonyms: input.synonyms.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        casrn: input.casrn.clone(),
        formula,
        weight,
        physical_state: input.physical_state,
        smiles: input.smiles.trim().to_string(),
        usmiles,
        class: input.class.clone(),
        subclass: input.subclass.clone(),
        family: input.family.clone(),
        characteristics,
        thermo: input.thermo.clone(),
        observations: input.observations.clone(),
        references: input.references.clone(),
    };
    Ok(Prepared { record, warnings })
}

/// In-memory compound store with an optional on-disk event log.
#[derive(Debug, Default)]
pub struct Store {
    records: BTreeMap<String, CompoundRecord>,
    by_usmiles: HashMap<String, String>,
    history: Vec<HistoryEntry>,
    submissions: BTreeMap<String, PendingSubmission>,
    notices: Vec<ReviewNotice>,
    max_id: u32,
    log: Option<(PathBuf, BufWriter<File>)>,
}

impl Store {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Open or create the store log at `path` and replay it.
    pub fn open(path: &Path) -> Result<Self, StoreError> {
        let mut store = Store::default();
        if path.exists() {
            let text = std::fs::read_to_string(path).map_err(|e| StoreError::Io(format!("{}: {e}", path.display())))?;
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let event: Event = serde_json::from_str(line).map_err(|e| StoreError::Format {
                    line: i + 1,
                    message: e.to_string(),
                })?;
                store.apply(event);
            }
        } else if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| StoreError::Io(format!("{}: {e}", dir.display())))?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| StoreError::Io(format!("{}: {e}", path.display())))?;
        store.log = Some((path.to_path_buf(), BufWriter::new(file)));
        Ok(store)
    }

    pub fn path(&self) -> Option<&Path> {
        self.log.as_ref().map(|(p, _)| p.as_path())
    }

    fn commit(&mut self, events: Vec<Event>) -> Result<(), StoreError> {
        if let Some((path, w)) = &mut self.log {
            let io = |e: std::io::Error| StoreError::Io(format!("{}: {e}", path.display()));
            for e in &events {
                let line = serde_json::to_string(e).expect("event serialises");
                w.write_all(line.as_bytes()).map_err(io)?;
                w.write_all(b"\n").map_err(io)?;
            }
            w.flush().map_err(io)?;
        }
        for e in events {
            self.apply(e);
        }
        Ok(())
    }

    fn insert(&mut self, record: CompoundRecord, at: &str, reason: &str) {
        self.max_id = self.max_id.max(id_number(&record.molecular_id));
        if let Some(old) = self.records.remove(&record.molecular_id) {
            self.by_usmiles.remove(&old.usmiles);
            self.history.push(HistoryEntry {
                retired_at: at.to_string(),
                reason: reason.to_string(),
                record: old,
            });
        }
        self.by_usmiles.insert(record.usmiles.clone(), record.molecular_id.clone());
        self.records.insert(record.molecular_id.clone(), record);
    }

    fn apply(&mut self, event: Event) {
        match event {
            Event::Upsert { at, reason, record } => self.insert(record, &at, &reason),
            Event::Delete { at, molecular_id } => {
                if let Some(old) = self.records.remove(&molecular_id) {
                    self.by_usmiles.remove(&old.usmiles);
                    self.history.push(HistoryEntry {
                        retired_at: at,
                        reason: "deleted".into(),
                        record: old,
                    });
                }
            }
            Event::Submit { submission } => {
                self.submissions.insert(submission.id.clone(), submission);
            }
            Event::Review {
                at,
                submission_id,
                decision,
                note,
                molecular_id,
            } => {
                let Some(sub) = self.submissions.get_mut(&submission_id) else {
                    return;
                };
                sub.status = match decision {
                    Decision::Approve => SubmissionStatus::Approved,
                    Decision::Reject => SubmissionStatus::Rejected,
                };
                sub.reviewer_note = note.clone();
                sub.reviewed_at = Some(at.clone());
                sub.molecular_id = molecular_id.clone();
                let notice = ReviewNotice {
                    submission_id,
                    submitter: sub.submitter.clone(),
                    decision,
                    note,
                    molecular_id: molecular_id.clone(),
                    at: at.clone(),
                };
                if let Some(id) = molecular_id {
                    let mut record = sub.payload.clone();
                    record.molecular_id = id;
                    self.insert(record, &at, "approved");
                }
                self.notices.push(notice);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&CompoundRecord> {
        self.records.get(id)
    }

    pub fn id_for_usmiles(&self, usmiles: &str) -> Option<&str> {
        self.by_usmiles.get(usmiles).map(String::as_str)
    }

    /// Records in molecular id order.
    pub fn records(&self) -> impl Iterator<Item = &CompoundRecord> {
        self.records.values()
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    /// History entries for one compound, oldest first.
    pub fn history_of(&self, id: &str) -> Vec<&HistoryEntry> {
        self.history.iter().filter(|h| h.record.molecular_id == id).collect()
    }

    pub fn notices(&self) -> &[ReviewNotice] {
        &self.notices
    }

    fn next_id(&self) -> String {
        format_molecular_id(self.max_id + 1)
    }

    pub fn ingest_file(&mut self, path: &Path) -> Result<IngestReport, StoreError> {
        let rows = read_dataset(path)?;
        self.ingest_rows(rows)
    }

    /// Validate and insert dataset rows. Rows whose structure is already
    /// stored are duplicates when they carry no id or the stored id, and
    /// are rejected as redundant under any other id. A molecular id used
    /// twice in one dataset fails the whole ingest.
    pub fn ingest_rows(&mut self, rows: Vec<DatasetRow>) -> Result<IngestReport, StoreError> {
        let mut first_line: HashMap<String, usize> = HashMap::new();
        for (line, row) in &rows {
            if let Ok(CompoundInput {
                molecular_id: Some(id), ..
            }) = row
            {
                if let Some(&first) = first_line.get(id.as_str()) {
                    return Err(StoreError::DuplicateId {
                        id: id.clone(),
                        first,
                        second: *line,
                    });
                }
                first_line.insert(id.clone(), *line);
            }
        }

        let mut report = IngestReport::default();
        let mut events = Vec::new();
        let mut pending_usmiles: HashMap<String, String> = HashMap::new();
        let mut pending_ids: BTreeSet<String> = BTreeSet::new();
        let mut next = self.max_id;
        let at = now();
        for (line, row) in rows {
            let mut outcome = RowOutcome {
                line,
                molecular_id: None,
                name: String::new(),
                status: RowStatus::Rejected,
                issues: Vec::new(),
                warnings: Vec::new(),
            };
            let input = match row {
                Ok(i) => i,
                Err(message) => {
                    outcome.issues.push(Issue {
                        code: IssueCode::Unreadable,
                        field: None,
                        message,
                    });
                    report.rejected += 1;
                    report.rows.push(outcome);
                    continue;
                }
            };
            outcome.name = input.name.clone();
            outcome.molecular_id = input.molecular_id.clone();
            let prepared = match prepare(&input) {
                Ok(p) => p,
                Err(issues) => {
                    outcome.issues = issues;
                    report.rejected += 1;
                    report.rows.push(outcome);
                    continue;
                }
            };
            outcome.warnings = prepared.warnings;
            let mut record = prepared.record;
            let existing = self
                .by_usmiles
                .get(&record.usmiles)
                .or_else(|| pending_usmiles.get(&record.usmiles))
                .cloned();
            let declared = input.molecular_id.clone();
            if let Some(existing) = existing {
                if declared.as_ref().is_none_or(|d| *d == existing) {
                    outcome.status = RowStatus::Duplicate;
                    outcome.molecular_id = Some(existing);
                    report.duplicates += 1;
                } else {
                    outcome.issues.push(Issue::new(
                        IssueCode::Redundant,
                        "smiles",
                        format!("same structure as {existing}"),
                    ));
                    report.rejected += 1;
                }
                report.rows.push(outcome);
                continue;
            }
            let id = match declared {
                Some(d) if self.records.contains_key(&d) || pending_ids.contains(&d) => {
                    outcome.issues.push(Issue::new(
                        IssueCode::IdConflict,
                        "molecular_id",
                        format!("{d} is already used by a different structure"),
                    ));
                    report.rejected += 1;
                    report.rows.push(outcome);
                    continue;
                }
                Some(d) => d,
                None => {
                    // Assigned ids must also skip ids declared later in the file.
                    loop {
                        next += 1;
                        let candidate = format_molecular_id(next);
                        if !first_line.contains_key(candidate.as_str()) && !self.records.contains_key(&candidate) {
                            break candidate;
                        }
                    }
                }
            };
            next = next.max(id_number(&id));
            record.molecular_id = id.clone();
            pending_usmiles.insert(record.usmiles.clone(), id.clone());
            pending_ids.insert(id.clone());
            outcome.molecular_id = Some(id);
            outcome.status = RowStatus::Accepted;
            report.accepted += 1;
            report.rows.push(outcome);
            events.push(Event::Upsert {
                at: at.clone(),
                reason: "ingest".into(),
                record,
            });
        }
        self.commit(events)?;
        Ok(report)
    }

    /// Queue a user contribution for review. Structural duplicates are
    /// accepted with a warning for the reviewer.
    pub fn submit(&mut self, input: &CompoundInput, submitter: &str) -> Result<PendingSubmission, StoreError> {
        let mut candidate = input.clone();
        let mut warnings = Vec::new();
        if let Some(id) = candidate.molecular_id.take() {
            warnings.push(format!("submitted molecular id {id} ignored; ids are assigned on approval"));
        }
        let prepared = prepare(&candidate).map_err(StoreError::Invalid)?;
        warnings.extend(prepared.warnings);
        if let Some(existing) = self.by_usmiles.get(&prepared.record.usmiles) {
            warnings.push(format!("same structure as stored compound {existing}"));
        }
        let submission = PendingSubmission {
            id: format!("S{:06}", self.submissions.len() + 1),
            submitter: submitter.to_string(),
            submitted_at: now(),
            status: SubmissionStatus::Pending,
            reviewer_note: None,
            reviewed_at: None,
            molecular_id: None,
            warnings,
            payload: prepared.record,
        };
        self.commit(vec![Event::Submit {
            submission: submission.clone(),
        }])?;
        Ok(submission)
    }

    pub fn submission(&self, id: &str) -> Option<&PendingSubmission> {
        self.submissions.get(id)
    }

    pub fn pending(&self) -> Vec<&PendingSubmission> {
        self.submissions
            .values()
            .filter(|s| s.status == SubmissionStatus::Pending)
            .collect()
    }

    pub fn submissions(&self) -> impl Iterator<Item = &PendingSubmission> {
        self.submissions.values()
    }

    /// Approve (insert under the next molecular id) or reject a pending
    /// submission. The decision is recorded either way.
    pub fn review(&mut self, id: &str, decision: Decision, note: Option<&str>) -> Result<PendingSubmission, StoreError> {
        let sub = self.submissions.get(id).ok_or_else(|| StoreError::NotFound {
            what: "submission",
            id: id.to_string(),
        })?;
        if sub.status != SubmissionStatus::Pending {
            return Err(StoreError::AlreadyDecided {
                id: id.to_string(),
                status: sub.status,
            });
        }
        let molecular_id = match decision {
            Decision::Approve => {
                if let Some(existing) = self.by_usmiles.get(&sub.payload.usmiles) {
                    return Err(StoreError::Conflict(format!(
                        "submission {id} has the same structure as stored compound {existing}"
                    )));
                }
                Some(self.next_id())
            }
            Decision::Reject => None,
        };
        self.commit(vec![Event::Review {
            at: now(),
            submission_id: id.to_string(),
            decision,
            note: note.map(str::to_string),
            molecular_id,
        }])?;
        Ok(self.submissions[id].clone())
    }

    /// Replace a stored record; the previous version moves to history.
    pub fn update(&mut self, id: &str, input: &CompoundInput) -> Result<CompoundRecord, StoreError> {
        if !self.records.contains_key(id) {
            return Err(StoreError::NotFound {
                what: "compound",
                id: id.to_string(),
            });
        }
        let mut input = input.clone();
        input.molecular_id = Some(id.to_string());
        let prepared = prepare(&input).map_err(StoreError::Invalid)?;
        if let Some(other) = self.by_usmiles.get(&prepared.record.usmiles).filter(|o| o.as_str() != id) {
            return Err(StoreError::Conflict(format!("structure already stored as {other}")));
        }
        let record = prepared.record;
        self.commit(vec![Event::Upsert {
            at: now(),
            reason: "updated".into(),
            record: record.clone(),
        }])?;
        Ok(record)
    }

    /// Remove a record; it is kept in history.
    pub fn delete(&mut self, id: &str) -> Result<CompoundRecord, StoreError> {
        let old = self.records.get(id).cloned().ok_or_else(|| StoreError::NotFound {
            what: "compound",
            id: id.to_string(),
        })?;
        self.commit(vec![Event::Delete {
            at: now(),
            molecular_id: id.to_string(),
        }])?;
        Ok(old)
    }

    pub fn stats(&self) -> StoreStats {
        let mut s = StoreStats {
            compounds: self.records.len(),
            pending_submissions: self.pending().len(),
            history_entries: self.history.len(),
            ..StoreStats::default()
        };
        let mut classes = BTreeSet::new();
        let mut subclasses = BTreeSet::new();
        let mut families = BTreeSet::new();
        for r in self.records.values() {
            s.synonyms += r.synonyms.len();
            s.casrn += usize::from(r.casrn.is_some());
            classes.extend(r.class.as_deref());
            subclasses.extend(r.subclass.as_deref());
            families.extend(r.family.as_deref());
            let has = |k: ThermoKind| usize::from(r.thermo.iter().any(|t| t.kind == k));
            s.formation.cr += has(ThermoKind::FormationCrystal);
            s.formation.l += has(ThermoKind::FormationLiquid);
            s.formation.g += has(ThermoKind::FormationGas);
            s.phase_change.fus += has(ThermoKind::Fusion);
            s.phase_change.vap += has(ThermoKind::Vaporization);
            s.phase_change.sub += has(ThermoKind::Sublimation);
        }
        s.classes = classes.len();
        s.subclasses = subclasses.len();
        s.families = families.len();
        s
    }

    /// Re-check every stored record against the record invariants.
    pub fn audit(&self) -> AuditReport {
        let mut report = AuditReport {
            checked: self.records.len(),
            problems: Vec::new(),
        };
        let mut seen_usmiles: HashMap<&str, &str> = HashMap::new();
        for (id, r) in &self.records {
            let mut problem = |code, field: &str, message: String| {
                report.problems.push(AuditProblem {
                    molecular_id: id.clone(),
                    issue: Issue::new(code, field, message),
                })
            };
            if !is_molecular_id(id) || *id != r.molecular_id {
                problem(IssueCode::InvalidId, "molecular_id", format!("malformed id '{id}'"));
            }
            if let Some(c) = &r.casrn {
                if !validate_casrn(c) {
                    problem(IssueCode::InvalidCasrn, "casrn", format!("'{c}' fails the check digit"));
                }
            }
            match parse_smiles(&r.smiles) {
                Err(e) => problem(IssueCode::Structure, "smiles", e.to_string()),
                Ok(mol) => {
                    let usmiles = canonical_smiles(&mol);
                    if usmiles != r.usmiles {
                        problem(IssueCode::Structure, "usmiles", format!("stored '{}' but canonical form is '{usmiles}'", r.usmiles));
                    }
                    let formula = molecular_formula(&mol);
                    if formula != r.formula {
                        problem(IssueCode::FormulaMismatch, "formula", format!("stored {} but structure is {formula}", r.formula));
                    }
                    let w = molecular_weight(&mol);
                    if (w - r.weight).abs() > WEIGHT_TOLERANCE {
                        problem(IssueCode::WeightMismatch, "weight", format!("stored {} but structure weighs {w:.3}", r.weight));
                    }
                }
            }
            if let Some(other) = seen_usmiles.insert(&r.usmiles, id) {
                problem(IssueCode::Redundant, "usmiles", format!("same structure as {other}"));
            }
        }
        report
    }
}

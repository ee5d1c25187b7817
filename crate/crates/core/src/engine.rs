//! The application core behind the HTTP service and the command line: a
//! single-writer store, immutable search snapshots swapped on every write,
//! and the parameter tables used for prediction.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use serde::{Deserialize, Serialize};

use crate::api::{
    ApiError, DatasetFormat, ErrorCode, ExperimentalValues, IngestRequest, FeatureRow, PredictionRequest, PredictionResponse, QueryEcho,
};
use crate::chem::{canonical_smiles, molecular_formula, molecular_weight, parse_smiles};
use crate::elba::{check_domain, describe, extract_features, ElbaError};
use crate::fixtures;
use crate::search::{AdvancedFilters, IndexedCompound, SearchIndex, SearchResponse, Threshold};
use crate::store::{
    parse_csv, parse_jsonl, AuditReport, CompoundInput, CompoundRecord, DatasetRow, Decision, HistoryEntry, IngestReport, PendingSubmission,
    Store, StoreStats,
};
use crate::thermo::{estimate, fit_parameters, FitOptions, FitReport, ParameterTable, Phase, ThermoError, TrainingPoint};

/// Training points for `phase` from records that carry the matching
/// formation enthalpy and fall inside the estimation domain. Returns the
/// points and the ids of records skipped as out of domain.
pub fn training_points<'a>(
    records: impl IntoIterator<Item = &'a CompoundRecord>,
    phase: Phase,
) -> (Vec<TrainingPoint>, Vec<String>) {
    let kind = phase.formation_kind();
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for r in records {
        let Some(observed) = r.thermo.iter().find(|t| t.kind == kind) else {
            continue;
        };
        let features = parse_smiles(&r.smiles)
            .ok()
            .and_then(|m| extract_features(&m, 0).ok());
        match features {
            Some(features) => points.push(TrainingPoint {
                id: r.molecular_id.clone(),
                features,
                observed: *observed,
            }),
            None => skipped.push(r.molecular_id.clone()),
        }
    }
    (points, skipped)
}

/// Fit a table for `phase` on a dataset's rows. Rows that fail validation
/// are ignored.
pub fn fit_rows(rows: Vec<DatasetRow>, phase: Phase, dataset: &str) -> Result<FitReport, ApiError> {
    let mut store = Store::in_memory();
    store.ingest_rows(rows)?;
    let (points, _) = training_points(store.records(), phase);
    Ok(fit_parameters(
        &points,
        phase,
        &FitOptions {
            dataset: dataset.to_string(),
            universe: None,
        },
    )?)
}

/// Gas and liquid parameter tables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Tables {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gas: Option<ParameterTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub liquid: Option<ParameterTable>,
}

impl Tables {
    /// Tables fitted on the bundled hydrocarbon set.
    pub fn bundled() -> Self {
        let fit = |phase| {
            fit_rows(fixtures::hydrocarbon_rows(), phase, fixtures::HYDROCARBON_DATASET)
                .ok()
                .map(|r| r.fitted)
        };
        Tables {
            gas: fit(Phase::Gas),
            liquid: fit(Phase::Liquid),
        }
    }

    pub fn get(&self, phase: Phase) -> Option<&ParameterTable> {
        match phase {
            Phase::Gas => self.gas.as_ref(),
            Phase::Liquid => self.liquid.as_ref(),
        }
    }

    pub fn set(&mut self, table: ParameterTable) {
        match table.phase {
            Phase::Gas => self.gas = Some(table),
            Phase::Liquid => self.liquid = Some(table),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct EngineConfig {
    /// Store event log; in memory when absent.
    pub store_path: Option<PathBuf>,
    /// Ingest the bundled datasets when the store starts empty.
    pub seed_fixtures: bool,
    pub gas_table: Option<PathBuf>,
    pub liquid_table: Option<PathBuf>,
}

/// Readers' view of the store at one point in time.
#[derive(Debug)]
pub struct Snapshot {
    pub index: SearchIndex,
    pub stats: StoreStats,
}

pub struct Engine {
    store: Mutex<Store>,
    snapshot: RwLock<Arc<Snapshot>>,
    tables: RwLock<Arc<Tables>>,
}

fn build_snapshot(store: &Store, previous: Option<&Snapshot>) -> Snapshot {
    let config = previous.map(|p| *p.index.config()).unwrap_or_default();
    let old: HashMap<&str, &Arc<IndexedCompound>> = previous
        .map(|p| {
            p.index
                .entries()
                .iter()
                .map(|e| (e.record.molecular_id.as_str(), e))
                .collect()
        })
        .unwrap_or_default();
    let entries = store
        .records()
        .filter_map(|r| match old.get(r.molecular_id.as_str()) {
            Some(e) if e.record == *r => Some(Arc::clone(e)),
            _ => IndexedCompound::new(r.clone(), &config).ok().map(Arc::new),
        })
        .collect();
    Snapshot {
        index: SearchIndex::from_entries(entries, config),
        stats: store.stats(),
    }
}

impl Engine {
    pub fn new(store: Store, tables: Tables) -> Self {
        let snapshot = build_snapshot(&store, None);
        Engine {
            store: Mutex::new(store),
            snapshot: RwLock::new(Arc::new(snapshot)),
            tables: RwLock::new(Arc::new(tables)),
        }
    }

    pub fn open(config: &EngineConfig) -> Result<Self, ApiError> {
        let mut store = match &config.store_path {
            Some(p) => Store::open(p)?,
            None => Store::in_memory(),
        };
        if config.seed_fixtures && store.is_empty() {
            store.ingest_rows(fixtures::all_rows())?;
        }
        let mut tables = if config.gas_table.is_some() && config.liquid_table.is_some() {
            Tables::default()
        } else {
            Tables::bundled()
        };
        for path in [&config.gas_table, &config.liquid_table].into_iter().flatten() {
            tables.set(ParameterTable::load(path)?);
        }
        Ok(Engine::new(store, tables))
    }

    /// In-memory engine seeded with the bundled datasets and tables.
    pub fn with_fixtures() -> Self {
        Engine::open(&EngineConfig {
            seed_fixtures: true,
            ..EngineConfig::default()
        })
        .expect("bundled fixtures load")
    }

    fn store(&self) -> MutexGuard<'_, Store> {
        self.store.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        Arc::clone(&self.snapshot.read().unwrap_or_else(|p| p.into_inner()))
    }

    pub fn tables(&self) -> Arc<Tables> {
        Arc::clone(&self.tables.read().unwrap_or_else(|p| p.into_inner()))
    }

    pub fn set_table(&self, table: ParameterTable) {
        let mut guard = self.tables.write().unwrap_or_else(|p| p.into_inner());
        let mut next = (**guard).clone();
        next.set(table);
        *guard = Arc::new(next);
    }

    /// Run a write against the store and publish a fresh snapshot.
    fn write<T>(&self, f: impl FnOnce(&mut Store) -> Result<T, ApiError>) -> Result<T, ApiError> {
        let mut store = self.store();
        let out = f(&mut store)?;
        let next = build_snapshot(&store, Some(&self.snapshot()));
        *self.snapshot.write().unwrap_or_else(|p| p.into_inner()) = Arc::new(next);
        Ok(out)
    }

    pub fn compound(&self, id: &str) -> Result<CompoundRecord, ApiError> {
        self.snapshot()
            .index
            .get(id)
            .map(|e| e.record.clone())
            .ok_or_else(|| ApiError::not_found("compound", id))
    }

    pub fn history(&self, id: &str) -> Vec<HistoryEntry> {
        self.store().history_of(id).into_iter().cloned().collect()
    }

    pub fn quick(&self, q: &str) -> Result<SearchResponse, ApiError> {
        Ok(self.snapshot().index.quick(q)?)
    }

    pub fn search_name(&self, q: &str) -> Result<SearchResponse, ApiError> {
        Ok(self.snapshot().index.search_name(q)?)
    }

    pub fn search_formula(&self, pattern: &str) -> Result<SearchResponse, ApiError> {
        Ok(self.snapshot().index.search_formula(pattern)?)
    }

    pub fn lookup(&self, key: &str) -> SearchResponse {
        self.snapshot().index.lookup(key)
    }

    pub fn search_structure(&self, smiles: &str, threshold_percent: u32) -> Result<SearchResponse, ApiError> {
        let threshold = Threshold::try_from(threshold_percent)?;
        Ok(self.snapshot().index.search_similarity(smiles, threshold)?)
    }

    pub fn search_substructure(&self, smiles: &str) -> Result<SearchResponse, ApiError> {
        Ok(self.snapshot().index.search_substructure(smiles)?)
    }

    pub fn search_advanced(&self, filters: &AdvancedFilters) -> Result<SearchResponse, ApiError> {
        Ok(self.snapshot().index.search_advanced(filters)?)
    }

    pub fn stats(&self) -> StoreStats {
        self.snapshot().stats.clone()
    }

    pub fn audit(&self) -> AuditReport {
        self.store().audit()
    }

    pub fn ingest_rows(&self, rows: Vec<DatasetRow>) -> Result<IngestReport, ApiError> {
        self.write(|s| Ok(s.ingest_rows(rows)?))
    }

    pub fn ingest_file(&self, path: &Path) -> Result<IngestReport, ApiError> {
        self.write(|s| Ok(s.ingest_file(path)?))
    }

    pub fn ingest_text(&self, req: &IngestRequest) -> Result<IngestReport, ApiError> {
        let rows = match req.format {
            DatasetFormat::Jsonl => parse_jsonl(&req.content),
            DatasetFormat::Csv => parse_csv(&req.content)?,
        };
        self.ingest_rows(rows)
    }

    pub fn submit(&self, input: &CompoundInput, submitter: &str) -> Result<PendingSubmission, ApiError> {
        if submitter.trim().is_empty() {
            return Err(ApiError::bad_request("submitter is required").with_field("submitter"));
        }
        self.write(|s| Ok(s.submit(input, submitter)?))
    }

    pub fn pending(&self) -> Vec<PendingSubmission> {
        self.store().pending().into_iter().cloned().collect()
    }

    pub fn submission(&self, id: &str) -> Result<PendingSubmission, ApiError> {
        self.store()
            .submission(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("submission", id))
    }

    pub fn review(&self, id: &str, decision: Decision, note: Option<&str>) -> Result<PendingSubmission, ApiError> {
        self.write(|s| Ok(s.review(id, decision, note)?))
    }

    pub fn update(&self, id: &str, input: &CompoundInput) -> Result<CompoundRecord, ApiError> {
        self.write(|s| Ok(s.update(id, input)?))
    }

    pub fn delete(&self, id: &str) -> Result<CompoundRecord, ApiError> {
        self.write(|s| Ok(s.delete(id)?))
    }

    /// Estimate enthalpies of formation for a structure given as SMILES or
    /// as a stored name.
    pub fn predict(&self, req: &PredictionRequest) -> Result<PredictionResponse, ApiError> {
        let snapshot = self.snapshot();
        let (input, smiles, mut name) = match (&req.smiles, &req.name) {
            (Some(s), _) if !s.trim().is_empty() => (s.clone(), s.trim().to_string(), None),
            (_, Some(n)) if !n.trim().is_empty() => {
                let wanted = n.trim().to_lowercase();
                let hit = snapshot
                    .index
                    .entries()
                    .iter()
                    .find(|e| e.record.names().any(|x| x.to_lowercase() == wanted))
                    .ok_or_else(|| {
                        ApiError::new(ErrorCode::NotFound, format!("no stored compound is named '{}'", n.trim()))
                            .with_field("name")
                    })?;
                (n.clone(), hit.record.smiles.clone(), Some(hit.record.name.clone()))
            }
            _ => return Err(ApiError::bad_request("either smiles or name is required").with_field("smiles")),
        };
        let mol = parse_smiles(&smiles).map_err(|e| ApiError::structure(e, "smiles"))?;
        let verdict = check_domain(&mol);
        if !verdict.in_domain {
            return Err(ApiError::out_of_domain(&verdict));
        }
        let features = extract_features(&mol, req.trans_ring_double_bonds).map_err(|e| match e {
            ElbaError::OutOfDomain(v) => ApiError::out_of_domain(&v),
            other => ApiError::bad_request(other.to_string()).with_field("trans_ring_double_bonds"),
        })?;

        let usmiles = canonical_smiles(&mol);
        let formula = molecular_formula(&mol);
        let stored = snapshot.index.by_usmiles(&usmiles).next();
        if name.is_none() {
            name = stored.map(|e| e.record.name.clone());
        }
        let experimental = stored.map(|e| ExperimentalValues {
            molecular_id: e.record.molecular_id.clone(),
            name: e.record.name.clone(),
            values: e.record.thermo.clone(),
        });
        let isomers = snapshot
            .index
            .search_formula(&formula.to_string())
            .map(|r| r.hits)
            .unwrap_or_default();

        let tables = self.tables();
        let phases = match req.phase {
            Some(p) => vec![p],
            None => vec![Phase::Gas, Phase::Liquid],
        };
        let mut estimates = Vec::new();
        let mut warnings = Vec::new();
        for phase in phases {
            match tables.get(phase).map(|t| estimate(&features, t)) {
                Some(Ok(v)) => estimates.push(v),
                Some(Err(ThermoError::MissingParameters(codes))) => warnings.push(format!(
                    "no {phase} estimate: the {phase} table has no value for {}",
                    codes.join(", ")
                )),
                Some(Err(e)) => warnings.push(format!("no {phase} estimate: {e}")),
                None => warnings.push(format!("no {phase} parameter table is loaded")),
            }
        }
        let features = features
            .iter()
            .map(|(code, n)| FeatureRow {
                code: *code,
                frequency: n,
                description: describe(code).map(str::to_string),
            })
            .collect();
        Ok(PredictionResponse {
            query: QueryEcho {
                input,
                canonical_smiles: usmiles,
                name,
                formula: formula.to_string(),
                weight: molecular_weight(&mol),
            },
            isomers,
            estimates,
            features,
            experimental,
            warnings,
        })
    }
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("compounds", &self.snapshot().index.len())
            .finish()
    }
}

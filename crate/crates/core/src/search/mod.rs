//! Name, formula, identifier, similarity, substructure and faceted search
//! over an immutable snapshot of the store.

mod characteristics;
mod fingerprint;
mod formula_pattern;
mod soundex;
mod substructure;

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chem::{canonical_smiles, molecular_weight, parse_smiles, ChemError, Molecule};
use crate::store::{is_molecular_id, normalize_characteristic, validate_casrn, CompoundRecord, PhysicalState};

pub use characteristics::derive_characteristics;
pub use fingerprint::{fingerprint, tanimoto, Fingerprint, FingerprintConfig};
pub use formula_pattern::{CountPattern, FormulaPattern};
pub use soundex::soundex;
pub use substructure::{find_embedding, is_substructure};

/// Upper bound on hits returned by any query.
pub const MAX_HITS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("empty query")]
    EmptyQuery,
    #[error("malformed formula pattern: {0}")]
    FormulaPattern(String),
    #[error("query structure: {0}")]
    Structure(#[from] ChemError),
    #[error("similarity threshold {0}% is not one of 70, 75, 80, 85, 90, 95, 100")]
    Threshold(u32),
    #[error("advanced search needs at least one filter")]
    EmptyFilters,
    #[error("unknown characteristic '{0}'")]
    UnknownCharacteristic(String),
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
}

/// Similarity thresholds offered to users, in percent.
pub const THRESHOLDS: [u32; 7] = [70, 75, 80, 85, 90, 95, 100];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Threshold(u32);

impl Threshold {
    pub fn percent(self) -> u32 {
        self.0
    }

    pub fn fraction(self) -> f64 {
        self.0 as f64 / 100.0
    }

    pub fn is_identity(self) -> bool {
        self.0 == 100
    }
}

impl TryFrom<u32> for Threshold {
    type Error = SearchError;

    fn try_from(p: u32) -> Result<Self, Self::Error> {
        if THRESHOLDS.contains(&p) {
            Ok(Threshold(p))
        } else {
            Err(SearchError::Threshold(p))
        }
    }
}

impl From<Threshold> for u32 {
    fn from(t: Threshold) -> u32 {
        t.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryMode {
    Name,
    Formula,
    MolecularId,
    Casrn,
    Similarity,
    Substructure,
    Advanced,
}

/// Per-hit ranking information; only the fields relevant to the query
/// mode are set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HitScore {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_position: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phonetic: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_mw: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub molecular_id: String,
    pub name: String,
    pub formula: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub casrn: Option<String>,
    pub smiles: String,
    pub weight: f64,
    pub score: HitScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub mode: QueryMode,
    /// Human-readable description of what was searched for.
    pub description: String,
    /// Matches before truncation to [`MAX_HITS`].
    pub total: usize,
    pub hits: Vec<SearchHit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// A stored compound with its precomputed search keys.
#[derive(Debug)]
pub struct IndexedCompound {
    pub record: CompoundRecord,
    pub molecule: Molecule,
    pub fingerprint: Fingerprint,
    lower_names: Vec<String>,
    soundex_names: Vec<Option<String>>,
}

impl IndexedCompound {
    pub fn new(record: CompoundRecord, config: &FingerprintConfig) -> Result<Self, ChemError> {
        let molecule = parse_smiles(&record.smiles)?;
        let fingerprint = fingerprint(&molecule, config);
        let lower_names = record.names().map(str::to_lowercase).collect();
        let soundex_names = record.names().map(soundex).collect();
        Ok(IndexedCompound {
            record,
            molecule,
            fingerprint,
            lower_names,
            soundex_names,
        })
    }

    fn hit(&self, score: HitScore) -> SearchHit {
        let r = &self.record;
        SearchHit {
            molecular_id: r.molecular_id.clone(),
            name: r.name.clone(),
            formula: r.formula.to_string(),
            casrn: r.casrn.clone(),
            smiles: r.smiles.clone(),
            weight: r.weight,
            score,
        }
    }
}

/// Conjunctive filters for advanced search. Unset fields do not filter.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AdvancedFilters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical_state: Option<PhysicalState>,
    /// Exact molecular weight, matched within ±0.01.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subclass: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// All listed tags are required.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub characteristics: Vec<String>,
}

impl AdvancedFilters {
    pub fn is_empty(&self) -> bool {
        self.name.as_deref().is_none_or(|s| s.trim().is_empty())
            && self.formula.as_deref().is_none_or(|s| s.trim().is_empty())
            && self.physical_state.is_none()
            && self.weight.is_none()
            && self.weight_min.is_none()
            && self.weight_max.is_none()
            && self.class.is_none()
            && self.subclass.is_none()
            && self.family.is_none()
            && self.characteristics.is_empty()
    }

    fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(v) = &self.name {
            parts.push(format!("name contains '{v}'"));
        }
        if let Some(v) = &self.formula {
            parts.push(format!("formula {v}"));
        }
        if let Some(v) = &self.physical_state {
            parts.push(format!("state {v}"));
        }
        if let Some(v) = self.weight {
            parts.push(format!("MW = {v}"));
        }
        if self.weight_min.is_some() || self.weight_max.is_some() {
            let lo = self.weight_min.map_or("-∞".to_string(), |v| v.to_string());
            let hi = self.weight_max.map_or("∞".to_string(), |v| v.to_string());
            parts.push(format!("MW in [{lo}, {hi}]"));
        }
        for (label, v) in [("class", &self.class), ("subclass", &self.subclass), ("family", &self.family)] {
            if let Some(v) = v {
                parts.push(format!("{label} '{v}'"));
            }
        }
        if !self.characteristics.is_empty() {
            parts.push(format!("characteristics {}", self.characteristics.join(", ")));
        }
        parts.join(" AND ")
    }
}

/// Quick-search classification of a free-text query.
pub fn detect_mode(q: &str) -> QueryMode {
    let q = q.trim();
    let casrn_shape = {
        let parts: Vec<&str> = q.split('-').collect();
        parts.len() == 3
            && parts.iter().all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()))
            && parts[0].len() <= 7
            && parts[1].len() == 2
            && parts[2].len() == 1
    };
    if casrn_shape {
        QueryMode::Casrn
    } else if is_molecular_id(q) {
        QueryMode::MolecularId
    } else if FormulaPattern::parse(q).is_ok() {
        QueryMode::Formula
    } else {
        QueryMode::Name
    }
}

/// Immutable search snapshot.
#[derive(Debug, Clone, Default)]
pub struct SearchIndex {
    entries: Vec<Arc<IndexedCompound>>,
    by_id: HashMap<String, usize>,
    by_casrn: HashMap<String, usize>,
    by_usmiles: HashMap<String, Vec<usize>>,
    config: FingerprintConfig,
}

fn truncate(mode: QueryMode, description: String, mut hits: Vec<SearchHit>, warnings: Vec<String>) -> SearchResponse {
    let total = hits.len();
    hits.truncate(MAX_HITS);
    SearchResponse {
        mode,
        description,
        total,
        hits,
        warnings,
    }
}

impl SearchIndex {
    /// Build from already indexed compounds, sorted by molecular id.
    pub fn from_entries(mut entries: Vec<Arc<IndexedCompound>>, config: FingerprintConfig) -> Self {
        entries.sort_by(|a, b| a.record.molecular_id.cmp(&b.record.molecular_id));
        let mut by_id = HashMap::new();
        let mut by_casrn = HashMap::new();
        let mut by_usmiles: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            by_id.insert(e.record.molecular_id.clone(), i);
            if let Some(c) = &e.record.casrn {
                by_casrn.entry(c.clone()).or_insert(i);
            }
            by_usmiles.entry(e.record.usmiles.clone()).or_default().push(i);
        }
        SearchIndex {
            entries,
            by_id,
            by_casrn,
            by_usmiles,
            config,
        }
    }

    pub fn build(records: impl IntoIterator<Item = CompoundRecord>) -> Result<Self, ChemError> {
        let config = FingerprintConfig::default();
        let entries = records
            .into_iter()
            .map(|r| IndexedCompound::new(r, &config).map(Arc::new))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_entries(entries, config))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Arc<IndexedCompound>] {
        &self.entries
    }

    pub fn config(&self) -> &FingerprintConfig {
        &self.config
    }

    pub fn get(&self, id: &str) -> Option<&IndexedCompound> {
        self.by_id.get(id).map(|&i| &*self.entries[i])
    }

    pub fn by_usmiles(&self, usmiles: &str) -> impl Iterator<Item = &IndexedCompound> {
        self.by_usmiles
            .get(usmiles)
            .into_iter()
            .flatten()
            .map(|&i| &*self.entries[i])
    }

    /// Dispatch a quick-search query by its detected mode.
    pub fn quick(&self, q: &str) -> Result<SearchResponse, SearchError> {
        match detect_mode(q) {
            QueryMode::Casrn | QueryMode::MolecularId => Ok(self.lookup(q)),
            QueryMode::Formula => self.search_formula(q),
            _ => self.search_name(q),
        }
    }

    /// Case-insensitive substring match over names and synonyms, ordered by
    /// (first match position, matched name length, molecular id). Falls
    /// back to Soundex equality when nothing contains the query.
    pub fn search_name(&self, q: &str) -> Result<SearchResponse, SearchError> {
        let q = q.trim();
        if q.is_empty() {
            return Err(SearchError::EmptyQuery);
        }
        let needle = q.to_lowercase();
        let mut scored: Vec<((usize, usize), &IndexedCompound, usize)> = Vec::new();
        for e in &self.entries {
            let best = e
                .lower_names
                .iter()
                .enumerate()
                .filter_map(|(k, n)| n.find(&needle).map(|pos| ((pos, n.chars().count()), k)))
                .min();
            if let Some((key, k)) = best {
                scored.push((key, e, k));
            }
        }
        let description = format!("name containing '{q}'");
        if !scored.is_empty() {
            scored.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.record.molecular_id.cmp(&b.1.record.molecular_id)));
            let hits = scored
                .into_iter()
                .map(|((pos, _), e, k)| {
                    e.hit(HitScore {
                        match_position: Some(pos),
                        matched_name: e.record.names().nth(k).map(str::to_string),
                        ..HitScore::default()
                    })
                })
                .collect();
            return Ok(truncate(QueryMode::Name, description, hits, Vec::new()));
        }

        let Some(code) = soundex(q) else {
            return Ok(truncate(QueryMode::Name, description, Vec::new(), Vec::new()));
        };
        let mut phonetic: Vec<(usize, &IndexedCompound, usize)> = self
            .entries
            .iter()
            .filter_map(|e| {
                e.soundex_names
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.as_deref() == Some(code.as_str()))
                    .map(|(k, _)| (e.lower_names[k].chars().count(), k))
                    .min()
                    .map(|(len, k)| (len, &**e, k))
            })
            .collect();
        phonetic.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.record.molecular_id.cmp(&b.1.record.molecular_id)));
        let hits = phonetic
            .into_iter()
            .map(|(_, e, k)| {
                e.hit(HitScore {
                    matched_name: e.record.names().nth(k).map(str::to_string),
                    phonetic: Some(true),
                    ..HitScore::default()
                })
            })
            .collect();
        Ok(truncate(
            QueryMode::Name,
            format!("{description}, phonetic match {code}"),
            hits,
            vec![format!("no name contains '{q}'; showing names sounding like it ({code})")],
        ))
    }

    /// Formula pattern match; hits ordered by molecular id.
    pub fn search_formula(&self, pattern: &str) -> Result<SearchResponse, SearchError> {
        let p = FormulaPattern::parse(pattern)?;
        let hits = self
            .entries
            .iter()
            .filter(|e| p.matches(&e.record.formula))
            .map(|e| e.hit(HitScore::default()))
            .collect();
        Ok(truncate(QueryMode::Formula, format!("formula {}", pattern.trim()), hits, Vec::new()))
    }

    /// Exact molecular id or CASRN lookup.
    pub fn lookup(&self, key: &str) -> SearchResponse {
        let key = key.trim();
        if is_molecular_id(key) {
            let hits = self.get(key).map(|e| e.hit(HitScore::default())).into_iter().collect();
            return truncate(QueryMode::MolecularId, format!("molecular id {key}"), hits, Vec::new());
        }
        if !validate_casrn(key) {
            return truncate(
                QueryMode::Casrn,
                format!("CASRN {key}"),
                Vec::new(),
                vec![format!("'{key}' is not a valid CAS registry number")],
            );
        }
        let hits = self
            .by_casrn
            .get(key)
            .map(|&i| self.entries[i].hit(HitScore::default()))
            .into_iter()
            .collect();
        truncate(QueryMode::Casrn, format!("CASRN {key}"), hits, Vec::new())
    }

    fn rank_structural(hits: &mut [(f64, f64, &IndexedCompound)]) {
        hits.sort_by(|a, b| {
            b.0.total_cmp(&a.0)
                .then(a.1.total_cmp(&b.1))
                .then_with(|| a.2.record.molecular_id.cmp(&b.2.record.molecular_id))
        });
    }

    /// Tanimoto similarity at or above the threshold; 100% means equal
    /// canonical SMILES. Ordered by (similarity desc, |ΔMW| asc, id).
    pub fn search_similarity(&self, smiles: &str, threshold: Threshold) -> Result<SearchResponse, SearchError> {
        let query = parse_smiles(smiles)?;
        let mw = molecular_weight(&query);
        let fp = fingerprint(&query, &self.config);
        let mut scored: Vec<(f64, f64, &IndexedCompound)> = if threshold.is_identity() {
            let usmiles = canonical_smiles(&query);
            self.by_usmiles(&usmiles)
                .map(|e| (1.0, (e.record.weight - mw).abs(), e))
                .collect()
        } else {
            let t = threshold.fraction();
            self.entries
                .iter()
                .filter_map(|e| {
                    let s = tanimoto(&fp, &e.fingerprint);
                    (s >= t).then_some((s, (e.record.weight - mw).abs(), &**e))
                })
                .collect()
        };
        Self::rank_structural(&mut scored);
        let hits = scored
            .into_iter()
            .map(|(s, d, e)| {
                e.hit(HitScore {
                    similarity: Some(s),
                    delta_mw: Some(d),
                    ..HitScore::default()
                })
            })
            .collect();
        Ok(truncate(
            QueryMode::Similarity,
            format!("structures {}% similar to {}", threshold.percent(), smiles.trim()),
            hits,
            Vec::new(),
        ))
    }

    /// Compounds containing the query as a subgraph: fingerprint screen,
    /// then an exact embedding check. Ordered like similarity search.
    pub fn search_substructure(&self, smiles: &str) -> Result<SearchResponse, SearchError> {
        let query = parse_smiles(smiles)?;
        let mw = molecular_weight(&query);
        let fp = fingerprint(&query, &self.config);
        let mut scored: Vec<(f64, f64, &IndexedCompound)> = self
            .entries
            .iter()
            .filter(|e| fp.is_subset_of(&e.fingerprint))
            .filter(|e| is_substructure(&query, &e.molecule))
            .map(|e| (tanimoto(&fp, &e.fingerprint), (e.record.weight - mw).abs(), &**e))
            .collect();
        Self::rank_structural(&mut scored);
        let hits = scored
            .into_iter()
            .map(|(s, d, e)| {
                e.hit(HitScore {
                    similarity: Some(s),
                    delta_mw: Some(d),
                    ..HitScore::default()
                })
            })
            .collect();
        Ok(truncate(
            QueryMode::Substructure,
            format!("structures containing {}", smiles.trim()),
            hits,
            Vec::new(),
        ))
    }

    /// Conjunction of all set filters; hits ordered by molecular id.
    pub fn search_advanced(&self, filters: &AdvancedFilters) -> Result<SearchResponse, SearchError> {
        if filters.is_empty() {
            return Err(SearchError::EmptyFilters);
        }
        let formula = filters
            .formula
            .as_deref()
            .filter(|s| !s.trim().is_empty())
            .map(FormulaPattern::parse)
            .transpose()?;
        let name = filters
            .name
            .as_deref()
            .map(|s| s.trim().to_lowercase())
            .filter(|s| !s.is_empty());
        let tags = filters
            .characteristics
            .iter()
            .map(|t| normalize_characteristic(t).ok_or_else(|| SearchError::UnknownCharacteristic(t.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        for w in [filters.weight, filters.weight_min, filters.weight_max].into_iter().flatten() {
            if !w.is_finite() {
                return Err(SearchError::InvalidFilter("molecular weight must be finite".into()));
            }
        }
        let label_eq = |want: &Option<String>, have: &Option<String>| match want {
            None => true,
            Some(w) => have.as_deref().is_some_and(|h| h.trim().eq_ignore_ascii_case(w.trim())),
        };
        let hits = self
            .entries
            .iter()
            .filter(|e| {
                let r = &e.record;
                name.as_ref().is_none_or(|n| e.lower_names.iter().any(|x| x.contains(n.as_str())))
                    && formula.as_ref().is_none_or(|p| p.matches(&r.formula))
                    && filters.physical_state.is_none_or(|s| r.physical_state == Some(s))
                    && filters.weight.is_none_or(|w| (r.weight - w).abs() <= 0.01)
                    && filters.weight_min.is_none_or(|w| r.weight >= w)
                    && filters.weight_max.is_none_or(|w| r.weight <= w)
                    && label_eq(&filters.class, &r.class)
                    && label_eq(&filters.subclass, &r.subclass)
                    && label_eq(&filters.family, &r.family)
                    && tags.iter().all(|t| r.characteristics.contains(*t))
            })
            .map(|e| e.hit(HitScore::default()))
            .collect();
        Ok(truncate(QueryMode::Advanced, filters.describe(), hits, Vec::new()))
    }
}

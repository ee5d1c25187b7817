//! Enthalpy estimation from ELBA feature vectors, least-squares refitting
//! of parameter tables, and phase-change consistency checks.

mod consistency;
mod fit;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elba::{ElbaCode, ElbaFeatureVector};

pub use consistency::{consistency_check, Finding, Identity};
pub use fit::{fit_parameters, FitOptions, FitReport, Residual, TrainingPoint};

/// Phase a parameter table estimates for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Gas,
    Liquid,
}

impl Phase {
    pub fn formation_kind(self) -> ThermoKind {
        match self {
            Phase::Gas => ThermoKind::FormationGas,
            Phase::Liquid => ThermoKind::FormationLiquid,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Gas => "gas",
            Phase::Liquid => "liquid",
        })
    }
}

impl std::str::FromStr for Phase {
    type Err = ThermoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gas" | "g" => Ok(Phase::Gas),
            "liquid" | "l" => Ok(Phase::Liquid),
            _ => Err(ThermoError::UnknownPhase(s.to_string())),
        }
    }
}

/// Standard molar enthalpy quantity at 298.15 K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ThermoKind {
    #[serde(rename = "formation_cr")]
    FormationCrystal,
    #[serde(rename = "formation_l")]
    FormationLiquid,
    #[serde(rename = "formation_g")]
    FormationGas,
    #[serde(rename = "fusion")]
    Fusion,
    #[serde(rename = "vaporization")]
    Vaporization,
    #[serde(rename = "sublimation")]
    Sublimation,
}

impl ThermoKind {
    pub const ALL: [ThermoKind; 6] = [
        ThermoKind::FormationCrystal,
        ThermoKind::FormationLiquid,
        ThermoKind::FormationGas,
        ThermoKind::Fusion,
        ThermoKind::Vaporization,
        ThermoKind::Sublimation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ThermoKind::FormationCrystal => "formation_cr",
            ThermoKind::FormationLiquid => "formation_l",
            ThermoKind::FormationGas => "formation_g",
            ThermoKind::Fusion => "fusion",
            ThermoKind::Vaporization => "vaporization",
            ThermoKind::Sublimation => "sublimation",
        }
    }

    pub fn is_formation(self) -> bool {
        matches!(
            self,
            ThermoKind::FormationCrystal | ThermoKind::FormationLiquid | ThermoKind::FormationGas
        )
    }
}

impl fmt::Display for ThermoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value in kJ/mol at 298.15 K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoValue {
    pub kind: ThermoKind,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uncertainty: Option<f64>,
}

impl ThermoValue {
    pub fn new(kind: ThermoKind, value: f64, uncertainty: Option<f64>) -> Self {
        ThermoValue {
            kind,
            value,
            uncertainty,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default)]
    pub dataset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
    #[serde(default)]
    pub compounds: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rms: Option<f64>,
}

/// Per-phase contribution of each code, kJ/mol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterTable {
    pub phase: Phase,
    pub entries: BTreeMap<ElbaCode, f64>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl ParameterTable {
    pub fn new(phase: Phase, entries: BTreeMap<ElbaCode, f64>) -> Result<Self, ThermoError> {
        let table = ParameterTable {
            phase,
            entries,
            provenance: Provenance::default(),
        };
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<(), ThermoError> {
        match self.entries.iter().find(|(_, v)| !v.is_finite()) {
            Some((code, _)) => Err(ThermoError::NonFinite(code.to_string())),
            None => Ok(()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ThermoError> {
        let table: ParameterTable =
            serde_json::from_str(text).map_err(|e| ThermoError::TableFormat(e.to_string()))?;
        table.validate()?;
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self, ThermoError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ThermoError::TableFormat(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serialises")
    }

    pub fn get(&self, code: &ElbaCode) -> Option<f64> {
        self.entries.get(code).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error("no parameter for {}", .0.join(", "))]
    MissingParameters(Vec<String>),
    #[error("training set is empty")]
    EmptyTraining,
    #[error("observation for '{0}' is not finite")]
    NonFiniteObservation(String),
    #[error("observation for '{id}' is {found}, expected {expected}")]
    PhaseMismatch {
        id: String,
        expected: ThermoKind,
        found: ThermoKind,
    },
    #[error("parameter {0} is not finite")]
    NonFinite(String),
    #[error("unknown phase '{0}' (expected gas or liquid)")]
    UnknownPhase(String),
    #[error("parameter table: {0}")]
    TableFormat(String),
    #[error("least-squares solve failed: {0}")]
    Solver(String),
}

/// Linear additivity: Σ count × parameter. Every code in `features` must
/// be covered by `table`.
pub fn estimate(features: &ElbaFeatureVector, table: &ParameterTable) -> Result<ThermoValue, ThermoError> {
    let missing: Vec<String> = features
        .codes()
        .filter(|c| !table.entries.contains_key(c))
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(ThermoError::MissingParameters(missing));
    }
    let value = features
        .iter()
        .map(|(code, n)| n as f64 * table.entries[code])
        .sum();
    Ok(ThermoValue::new(table.phase.formation_kind(), value, None))
}

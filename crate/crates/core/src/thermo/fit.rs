use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{estimate, ParameterTable, Phase, Provenance, ThermoError, ThermoValue};
use crate::elba::{known_codes, ElbaCode, ElbaFeatureVector};

/// One training compound.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingPoint {
    pub id: String,
    pub features: ElbaFeatureVector,
    pub observed: ThermoValue,
}

#[derive(Debug, Clone, Default)]
pub struct FitOptions {
    /// Dataset label recorded in the table provenance.
    pub dataset: String,
    /// Codes the caller expects a table to cover. Defaults to the code
    /// catalogue. Members without training support are reported as
    /// unidentifiable.
    pub universe: Option<Vec<ElbaCode>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub id: String,
    pub observed: f64,
    pub fitted: f64,
    /// fitted − observed
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub fitted: ParameterTable,
    pub residuals: Vec<Residual>,
    pub mad: f64,
    pub unidentifiable_codes: BTreeSet<ElbaCode>,
}

/// Minimum-norm least-squares fit of `min ‖X·p − y‖²`, where row i of X
/// holds the feature counts of training point i.
///
/// Codes absent from every training vector have an all-zero column; they
/// are left out of the table and reported as unidentifiable. Remaining
/// rank deficiency is resolved by the minimum-norm solution.
pub fn fit_parameters(
    training: &[TrainingPoint],
    phase: Phase,
    options: &FitOptions,
) -> Result<FitReport, ThermoError> {
    if training.is_empty() {
        return Err(ThermoError::EmptyTraining);
    }
    let expected = phase.formation_kind();
    for t in training {
        if t.observed.kind != expected {
            return Err(ThermoError::PhaseMismatch {
                id: t.id.clone(),
                expected,
                found: t.observed.kind,
            });
        }
        if !t.observed.value.is_finite() {
            return Err(ThermoError::NonFiniteObservation(t.id.clone()));
        }
    }

    let columns: Vec<ElbaCode> = training
        .iter()
        .flat_map(|t| t.features.codes().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<ElbaCode, usize> = columns.iter().enumerate().map(|(i, c)| (*c, i)).collect();

    let (m, p) = (training.len(), columns.len());
    let mut x = DMatrix::<f64>::zeros(m, p);
    let y = DVector::from_iterator(m, training.iter().map(|t| t.observed.value));
    for (row, t) in training.iter().enumerate() {
        for (code, n) in t.features.iter() {
            x[(row, index[code])] = n as f64;
        }
    }

    let params = if p == 0 {
        DVector::zeros(0)
    } else {
        let svd = x.clone().svd(true, true);
        let sigma_max = svd.singular_values.max();
        let eps = sigma_max * (m.max(p) as f64) * f64::EPSILON;
        svd.solve(&y, eps).map_err(|e| ThermoError::Solver(e.to_string()))?
    };

    let entries: BTreeMap<ElbaCode, f64> = columns.iter().copied().zip(params.iter().copied()).collect();
    let mut table = ParameterTable::new(phase, entries)?;

    let residuals: Vec<Residual> = training
        .iter()
        .map(|t| {
            let fitted = estimate(&t.features, &table).expect("every training code is fitted").value;
            Residual {
                id: t.id.clone(),
                observed: t.observed.value,
                fitted,
                error: fitted - t.observed.value,
            }
        })
        .collect();
    let mad = residuals.iter().map(|r| r.error.abs()).sum::<f64>() / m as f64;
    let rms = (residuals.iter().map(|r| r.error * r.error).sum::<f64>() / m as f64).sqrt();

    let universe: BTreeSet<ElbaCode> = match &options.universe {
        Some(codes) => codes.iter().copied().collect(),
        None => known_codes().copied().collect(),
    };
    let unidentifiable_codes = universe.into_iter().filter(|c| !index.contains_key(c)).collect();

    table.provenance = Provenance {
        dataset: options.dataset.clone(),
        created: Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
        compounds: m,
        mad: Some(mad),
        rms: Some(rms),
    };
    Ok(FitReport {
        fitted: table,
        residuals,
        mad,
        unidentifiable_codes,
    })
}

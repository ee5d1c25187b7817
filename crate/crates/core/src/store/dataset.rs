//! Compound dataset files: JSON lines, or CSV with a header row.

use std::collections::BTreeSet;
use std::path::Path;

use crate::thermo::{ThermoKind, ThermoValue};

use super::record::CompoundInput;
use super::StoreError;

/// One parsed dataset row, or the reason it could not be read.
pub type DatasetRow = (usize, Result<CompoundInput, String>);

pub fn read_dataset(path: &Path) -> Result<Vec<DatasetRow>, StoreError> {
    let text = std::fs::read_to_string(path).map_err(|e| StoreError::Io(format!("{}: {e}", path.display())))?;
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        parse_csv(&text)
    } else {
        Ok(parse_jsonl(&text))
    }
}

/// Rows are numbered from 1 by file line; blank lines and lines starting
/// with `#` are skipped.
pub fn parse_jsonl(text: &str) -> Vec<DatasetRow> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| (i + 1, serde_json::from_str::<CompoundInput>(l).map_err(|e| e.to_string())))
        .collect()
}

fn split_list(s: &str) -> Vec<String> {
    s.split(';').map(str::trim).filter(|x| !x.is_empty()).map(str::to_string).collect()
}

fn non_empty(s: &str) -> Option<String> {
    let t = s.trim();
    (!t.is_empty()).then(|| t.to_string())
}

/// CSV columns use the JSON field names. List fields (synonyms,
/// characteristics, references) are `;`-separated. Thermochemical values
/// use one column per kind (`formation_g`, `sublimation`, ...) with an
/// optional `<kind>_uncertainty` column.
pub fn parse_csv(text: &str) -> Result<Vec<DatasetRow>, StoreError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| StoreError::Format {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                rows.push((line, Err(e.to_string())));
                continue;
            }
        };
        rows.push((line, csv_row(&headers, &rec)));
    }
    Ok(rows)
}

fn csv_row(headers: &[String], rec: &csv::StringRecord) -> Result<CompoundInput, String> {
    let mut input = CompoundInput::default();
    let mut thermo: Vec<ThermoValue> = Vec::new();
    let mut uncertainties: Vec<(ThermoKind, f64)> = Vec::new();
    let number = |h: &str, v: &str| -> Result<f64, String> {
        v.trim().parse::<f64>().map_err(|_| format!("column {h}: '{v}' is not a number"))
    };
    for (h, v) in headers.iter().zip(rec.iter()) {
        if v.trim().is_empty() {
            continue;
        }
        match h.as_str() {
            "molecular_id" => input.molecular_id = non_empty(v),
            "name" => input.name = v.trim().to_string(),
            "synonyms" => input.synonyms = split_list(v),
            "casrn" => input.casrn = non_empty(v),
            "formula" => input.formula = non_empty(v),
            "weight" => input.weight = Some(number(h, v)?),
            "physical_state" => input.physical_state = Some(v.parse()?),
            "smiles" => input.smiles = v.trim().to_string(),
            "usmiles" => input.usmiles = non_empty(v),
            "class" => input.class = non_empty(v),
            "subclass" => input.subclass = non_empty(v),
            "family" => input.family = non_empty(v),
            "characteristics" => input.characteristics = split_list(v).into_iter().collect::<BTreeSet<_>>(),
            "observations" => input.observations = non_empty(v),
            "references" => input.references = split_list(v),
            other => {
                if let Some(kind) = ThermoKind::ALL.iter().find(|k| k.as_str() == other) {
                    thermo.push(ThermoValue::new(*kind, number(h, v)?, None));
                } else if let Some(kind) = other
                    .strip_suffix("_uncertainty")
                    .and_then(|k| ThermoKind::ALL.iter().find(|x| x.as_str() == k))
                {
                    uncertainties.push((*kind, number(h, v)?));
                } else {
                    return Err(format!("unknown column '{other}'"));
                }
            }
        }
    }
    for (kind, u) in uncertainties {
        match thermo.iter_mut().find(|t| t.kind == kind) {
            Some(t) => t.uncertainty = Some(u),
            None => return Err(format!("uncertainty given for {kind} without a value")),
        }
    }
    input.thermo = thermo;
    Ok(input)
}

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chem::MolecularFormula;
use crate::thermo::ThermoValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhysicalState {
    Gas,
    Liquid,
    Crystal,
}

impl fmt::Display for PhysicalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhysicalState::Gas => "gas",
            PhysicalState::Liquid => "liquid",
            PhysicalState::Crystal => "crystal",
        })
    }
}

impl std::str::FromStr for PhysicalState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gas" => Ok(PhysicalState::Gas),
            "liquid" => Ok(PhysicalState::Liquid),
            "crystal" => Ok(PhysicalState::Crystal),
            other => Err(format!("unknown physical state '{other}' (gas, liquid or crystal)")),
        }
    }
}

/// A stored compound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompoundRecord {
    pub molecular_id: String,
    pub name: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub casrn: Option<String>,
    pub formula: MolecularFormula,
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical_state: Option<PhysicalState>,
    pub smiles: String,
    pub usmiles: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subclass: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default)]
    pub characteristics: BTreeSet<String>,
    #[serde(default)]
    pub thermo: Vec<ThermoValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observations: Option<String>,
    #[serde(default)]
    pub references: Vec<String>,
}

impl CompoundRecord {
    /// Preferred name followed by synonyms.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.name.as_str()).chain(self.synonyms.iter().map(String::as_str))
    }
}

/// A compound as supplied by a dataset row or a submitter. Derived fields
/// (formula, weight, usmiles) are optional and checked when present.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CompoundInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub molecular_id: Option<String>,
    pub name: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub casrn: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical_state: Option<PhysicalState>,
    pub smiles: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usmiles: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subclass: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default)]
    pub characteristics: BTreeSet<String>,
    #[serde(default)]
    pub thermo: Vec<ThermoValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observations: Option<String>,
    #[serde(default)]
    pub references: Vec<String>,
}

impl From<&CompoundRecord> for CompoundInput {
    fn from(r: &CompoundRecord) -> Self {
        CompoundInput {
            molecular_id: Some(r.molecular_id.clone()),
            name: r.name.clone(),
            synonyms: r.synonyms.clone(),
            casrn: r.casrn.clone(),
            formula: Some(r.formula.to_string()),
            weight: Some(r.weight),
            physical_state: r.physical_state,
            smiles: r.smiles.clone(),
            usmiles: Some(r.usmiles.clone()),
            class: r.class.clone(),
            subclass: r.subclass.clone(),
            family: r.family.clone(),
            characteristics: r.characteristics.clone(),
            thermo: r.thermo.clone(),
            observations: r.observations.clone(),
            references: r.references.clone(),
        }
    }
}

/// True iff `casrn` has the form `N{2,7}-NN-N` without a leading zero and
/// its last digit equals the weighted digit sum (rightmost body digit × 1,
/// next × 2, ...) mod 10.
pub fn validate_casrn(casrn: &str) -> bool {
    let parts: Vec<&str> = casrn.split('-').collect();
    let [a, b, c] = parts.as_slice() else {
        return false;
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|x| x.is_ascii_digit());
    if !(digits(a) && digits(b) && digits(c)) || !(2..=7).contains(&a.len()) || a.starts_with('0') || b.len() != 2 || c.len() != 1 {
        return false;
    }
    let sum: u32 = a
        .bytes()
        .chain(b.bytes())
        .rev()
        .enumerate()
        .map(|(i, d)| (i as u32 + 1) * u32::from(d - b'0'))
        .sum();
    sum % 10 == u32::from(c.as_bytes()[0] - b'0')
}

/// True iff `id` is "C" followed by six digits.
pub fn is_molecular_id(id: &str) -> bool {
    id.len() == 7 && id.starts_with('C') && id[1..].bytes().all(|b| b.is_ascii_digit())
}

pub fn format_molecular_id(n: u32) -> String {
    format!("C{n:06}")
}

/// Vocabulary of characteristic tags.
pub const CHARACTERISTICS: [&str; 28] = [
    "alkane",
    "alkene",
    "alkyne",
    "arene",
    "alcohol",
    "ether",
    "peroxide",
    "aldehyde",
    "ketone",
    "carboxylic acid",
    "ester",
    "amine",
    "hydrazine",
    "imine",
    "nitrile/isonitrile",
    "NOx",
    "amide",
    "thiol",
    "thioether",
    "polysulphide",
    "thiocarbonyl",
    "SOx",
    "halogen",
    "radical",
    "charges",
    "ionic",
    "solvation",
    "polymer",
];

/// Map a tag to its vocabulary spelling, or `None` if it is not a known
/// tag. Matching ignores case; "nitrile" and "isonitrile" map to the
/// combined tag.
pub fn normalize_characteristic(tag: &str) -> Option<&'static str> {
    let t = tag.trim();
    if t.eq_ignore_ascii_case("nitrile") || t.eq_ignore_ascii_case("isonitrile") {
        return Some("nitrile/isonitrile");
    }
    CHARACTERISTICS.iter().copied().find(|c| c.eq_ignore_ascii_case(t))
}

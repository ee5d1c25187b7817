use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::element::Element;
use super::graph::Molecule;
use super::ChemError;

/// Element counts of a compound, hydrogens included.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MolecularFormula {
    counts: BTreeMap<Element, u32>,
}

impl MolecularFormula {
    pub fn from_counts(counts: impl IntoIterator<Item = (Element, u32)>) -> Self {
        let mut f = MolecularFormula::default();
        for (e, n) in counts {
            if n > 0 {
                *f.counts.entry(e).or_default() += n;
            }
        }
        f
    }

    pub fn count(&self, element: Element) -> u32 {
        self.counts.get(&element).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<Element, u32> {
        &self.counts
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.counts.keys().copied()
    }

    /// Elements in rendering order: C, H, F, Cl, Br, I, N, O, S, then the
    /// rest alphabetically.
    pub fn ordered(&self) -> Vec<(Element, u32)> {
        const LEAD: [Element; 9] = [
            Element::C,
            Element::H,
            Element::F,
            Element::CL,
            Element::BR,
            Element::I,
            Element::N,
            Element::O,
            Element::S,
        ];
        let mut out: Vec<(Element, u32)> = LEAD
            .iter()
            .filter_map(|e| self.counts.get(e).map(|&n| (*e, n)))
            .collect();
        let mut rest: Vec<(Element, u32)> = self
            .counts
            .iter()
            .filter(|(e, _)| !LEAD.contains(e))
            .map(|(e, n)| (*e, *n))
            .collect();
        rest.sort_by_key(|(e, _)| e.symbol());
        out.extend(rest);
        out
    }

    pub fn weight(&self) -> f64 {
        self.counts.iter().map(|(e, &n)| e.weight() * n as f64).sum()
    }
}

impl fmt::Display for MolecularFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, n) in self.ordered() {
            if n == 1 {
                write!(f, "{e}")?;
            } else {
                write!(f, "{e}{n}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for MolecularFormula {
    type Err = ChemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.trim().as_bytes();
        let mut counts = BTreeMap::new();
        let mut i = 0;
        if bytes.is_empty() {
            return Err(ChemError::Formula(s.to_string()));
        }
        while i < bytes.len() {
            if !bytes[i].is_ascii_uppercase() {
                return Err(ChemError::Formula(s.to_string()));
            }
            let mut end = i + 1;
            if end < bytes.len() && bytes[end].is_ascii_lowercase() {
                end += 1;
            }
            let symbol = std::str::from_utf8(&bytes[i..end]).expect("ascii");
            let element = Element::from_symbol(symbol).ok_or_else(|| ChemError::Formula(s.to_string()))?;
            i = end;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            let n: u32 = if end > i {
                s.trim()[i..end].parse().map_err(|_| ChemError::Formula(s.to_string()))?
            } else {
                1
            };
            i = end;
            *counts.entry(element).or_insert(0) += n;
        }
        Ok(MolecularFormula::from_counts(counts))
    }
}

impl Serialize for MolecularFormula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MolecularFormula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn molecular_formula(mol: &Molecule) -> MolecularFormula {
    let mut counts: BTreeMap<Element, u32> = BTreeMap::new();
    let mut hydrogens = 0u32;
    for atom in mol.atoms() {
        *counts.entry(atom.element).or_default() += 1;
        hydrogens += atom.implicit_hydrogens as u32;
    }
    if hydrogens > 0 {
        *counts.entry(Element::H).or_default() += hydrogens;
    }
    MolecularFormula::from_counts(counts)
}

/// Average molecular mass in g/mol from the bundled atomic-weight table.
pub fn molecular_weight(mol: &Molecule) -> f64 {
    let h = Element::H.weight();
    mol.atoms()
        .iter()
        .map(|a| a.element.weight() + a.implicit_hydrogens as f64 * h)
        .sum()
}

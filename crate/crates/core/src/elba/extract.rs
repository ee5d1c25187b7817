use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::code::{AtomClass, BondKind, ElbaCode, Family};
use super::{DomainReason, DomainVerdict, ElbaError};
use crate::chem::{BondOrder, BondStereo, Element, Molecule};

/// Class label of a carbon atom.
///
/// sp3 carbons are `C{k}` with k carbon neighbours. Aromatic carbons are
/// `A2` (bearing H) or `A3`. Carbons with one double bond are `D{k}` and
/// carbons with a triple bond or two double bonds are `T{k}`; for both, k
/// counts carbon neighbours reached through single bonds.
pub fn classify_atom(mol: &Molecule, atom: usize) -> Result<AtomClass, ElbaError> {
    let a = mol.atom(atom);
    if a.element != Element::C {
        return Err(ElbaError::NotCarbon {
            atom,
            element: a.element.symbol().to_string(),
        });
    }
    if a.aromatic {
        let index = if a.implicit_hydrogens > 0 { 2 } else { 3 };
        return Ok(AtomClass::new(Family::A, index));
    }
    let mut doubles = 0;
    let mut triples = 0;
    let mut single_carbons = 0u8;
    for &(n, b) in mol.neighbors(atom) {
        match mol.bond(b).order {
            BondOrder::Double => doubles += 1,
            BondOrder::Triple => triples += 1,
            BondOrder::Single | BondOrder::Aromatic => {
                if mol.atom(n).element == Element::C {
                    single_carbons += 1;
                }
            }
        }
    }
    let family = if triples > 0 || doubles > 1 {
        Family::T
    } else if doubles == 1 {
        Family::D
    } else {
        Family::C
    };
    Ok(AtomClass::new(family, single_carbons))
}

/// ELBA parameter occurrence counts for one molecule. Serialises as a JSON
/// object `{code: count}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElbaFeatureVector {
    counts: BTreeMap<ElbaCode, u32>,
}

impl ElbaFeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (ElbaCode, u32)>) -> Self {
        let mut v = Self::default();
        for (code, n) in counts {
            v.add(code, n);
        }
        v
    }

    pub fn add(&mut self, code: ElbaCode, n: u32) {
        if n > 0 {
            *self.counts.entry(code).or_default() += n;
        }
    }

    pub fn get(&self, code: &ElbaCode) -> u32 {
        self.counts.get(code).copied().unwrap_or(0)
    }

    /// Count for a code given as text; unknown or malformed codes count 0.
    pub fn get_str(&self, code: &str) -> u32 {
        code.parse().map(|c| self.get(&c)).unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ElbaCode, u32)> {
        self.counts.iter().map(|(c, &n)| (c, n))
    }

    pub fn codes(&self) -> impl Iterator<Item = &ElbaCode> {
        self.counts.keys()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Codes and counts as text pairs in print order.
    pub fn to_string_map(&self) -> BTreeMap<String, u32> {
        self.iter().map(|(c, n)| (c.to_string(), n)).collect()
    }
}

/// Applicability check: only carbon and hydrogen, no two basis rings
/// sharing an atom, and no charges or radical centres.
pub fn check_domain(mol: &Molecule) -> DomainVerdict {
    let mut reasons = Vec::new();
    if mol.atoms().iter().any(|a| a.element != Element::C) {
        reasons.push(DomainReason::NonHydrocarbon);
    }
    if !mol.fused_ring_pairs().is_empty() {
        reasons.push(DomainReason::FusedRing);
    }
    let unsupported = mol.atoms().iter().enumerate().any(|(i, a)| {
        a.charge != 0 || (a.element == Element::C && !a.aromatic && mol.bond_sum(i) + a.implicit_hydrogens != 4)
    });
    if unsupported {
        reasons.push(DomainReason::UnsupportedFeature);
    }
    DomainVerdict::from_reasons(reasons)
}

/// Derive the ELBA feature vector of an in-domain hydrocarbon.
///
/// `trans_ring_double_bonds` is the number of ring C=C bonds in 8- or
/// 12-membered rings that have E configuration; geometry is not perceived.
pub fn extract_features(
    mol: &Molecule,
    trans_ring_double_bonds: u32,
) -> Result<ElbaFeatureVector, ElbaError> {
    let verdict = check_domain(mol);
    if !verdict.in_domain {
        return Err(ElbaError::OutOfDomain(verdict));
    }
    let classes: Vec<AtomClass> = (0..mol.atom_count())
        .map(|i| classify_atom(mol, i))
        .collect::<Result<_, _>>()?;
    let mut v = ElbaFeatureVector::new();

    for (bi, bond) in mol.bonds().iter().enumerate() {
        let (x, y) = (classes[bond.a], classes[bond.b]);
        let kind = match bond.order {
            BondOrder::Double => BondKind::Double,
            BondOrder::Triple => BondKind::Triple,
            BondOrder::Single if x.family == Family::A && y.family == Family::A => BondKind::Biaryl,
            BondOrder::Single | BondOrder::Aromatic => BondKind::Plain,
        };
        v.add(ElbaCode::bond(x, y, kind), 1);
        if bond.order == BondOrder::Aromatic && x == y && x.index == 3 {
            v.add(ElbaCode::Ortho, 1);
        }
        if bond.order == BondOrder::Double && !mol.bond_in_ring(bi) {
            v.add(ElbaCode::Cis, cis_pairs(mol, bond.a, bond.b, bond.stereo, bond.stereo_refs));
        }
    }

    for (i, atom) in mol.atoms().iter().enumerate() {
        v.add(ElbaCode::Hydrogen(classes[i]), atom.implicit_hydrogens as u32);
    }

    for ring in mol.rings() {
        for &a in &ring.atoms {
            if classes[a].family == Family::C {
                v.add(
                    ElbaCode::Strain {
                        ring_size: ring.size() as u8,
                        class: classes[a].index,
                    },
                    1,
                );
            }
        }
    }

    if trans_ring_double_bonds > 0 {
        let mut eligible: Vec<u8> = mol
            .bonds()
            .iter()
            .enumerate()
            .filter(|(_, b)| b.order == BondOrder::Double)
            .filter_map(|(bi, _)| {
                mol.rings()
                    .iter()
                    .filter(|r| r.contains_bond(bi) && matches!(r.size(), 8 | 12))
                    .map(|r| r.size() as u8)
                    .min()
            })
            .collect();
        if trans_ring_double_bonds as usize > eligible.len() {
            return Err(ElbaError::TransRingHint {
                requested: trans_ring_double_bonds,
                available: eligible.len() as u32,
            });
        }
        eligible.sort_unstable();
        for size in eligible.into_iter().take(trans_ring_double_bonds as usize) {
            v.add(ElbaCode::TransRing(size), 1);
        }
    }
    Ok(v)
}

/// Pairs of carbon substituents lying cis across the double bond a=b.
/// With unknown configuration only pairs forced by a doubly substituted
/// end are counted.
fn cis_pairs(
    mol: &Molecule,
    a: usize,
    b: usize,
    stereo: BondStereo,
    refs: Option<(usize, usize)>,
) -> u32 {
    let carbons = |end: usize, other: usize| -> Vec<usize> {
        mol.neighbors(end)
            .iter()
            .map(|&(n, _)| n)
            .filter(|&n| n != other && mol.atom(n).element == Element::C)
            .collect()
    };
    let ca = carbons(a, b);
    let cb = carbons(b, a);
    match (stereo, refs) {
        (BondStereo::Cis | BondStereo::Trans, Some((ra, rb))) => {
            let cis = stereo == BondStereo::Cis;
            let mut n = 0;
            for &x in &ca {
                for &y in &cb {
                    if ((x == ra) == (y == rb)) == cis {
                        n += 1;
                    }
                }
            }
            n
        }
        _ => {
            if ca.len() == 2 {
                cb.len() as u32
            } else if cb.len() == 2 {
                ca.len() as u32
            } else {
                0
            }
        }
    }
}

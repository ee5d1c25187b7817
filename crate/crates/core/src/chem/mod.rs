//! Structure parsing and the graph services every other module builds on:
//! formula, mass, rings, and canonical form.

mod aromaticity;
mod canon;
mod element;
mod formula;
mod graph;
mod molfile;
mod rings;
mod smiles;

use serde::Serialize;
use thiserror::Error;

pub use canon::{canonical_ranks, canonical_smiles, symmetry_classes, write_smiles};
pub use element::{weight_table_version, Element};
pub use formula::{molecular_formula, molecular_weight, MolecularFormula};
pub use graph::{
    default_hydrogens, Atom, AtomSpec, Bond, BondOrder, BondSpec, BondStereo, Direction, Molecule,
    MoleculeBuilder, Ring,
};
pub use molfile::parse_molfile;
pub use smiles::parse_smiles;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChemError {
    #[error("empty structure")]
    Empty,
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("ring bond {digit} is never closed")]
    UnclosedRing { digit: u32 },
    #[error("valence exceeded on atom {atom} ({element}) at position {position}")]
    Valence {
        atom: usize,
        element: String,
        position: usize,
    },
    #[error("unsupported element '{symbol}' at position {position}")]
    UnsupportedElement { symbol: String, position: usize },
    #[error("input holds {fragments} disconnected fragments; one compound expected")]
    Disconnected { fragments: usize },
    #[error("aromatic atom {atom} is not in a ring")]
    AromaticOutsideRing { atom: usize },
    #[error("invalid bond: {message}")]
    InvalidBond { message: String },
    #[error("molfile line {line}: {message}")]
    Molfile { line: usize, message: String },
    #[error("malformed molecular formula '{0}'")]
    Formula(String),
}

impl ChemError {
    /// Character offset for errors tied to a location in the input.
    pub fn position(&self) -> Option<usize> {
        match self {
            ChemError::Syntax { position, .. }
            | ChemError::Valence { position, .. }
            | ChemError::UnsupportedElement { position, .. } => Some(*position),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingDescriptor {
    pub atoms: Vec<usize>,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingPerception {
    pub rings: Vec<RingDescriptor>,
    /// Per atom, the sizes of basis rings containing it.
    pub atom_ring_sizes: Vec<Vec<usize>>,
    /// Index pairs of basis rings sharing at least one atom.
    pub fused_pairs: Vec<(usize, usize)>,
}

impl RingPerception {
    pub fn has_fused_or_bridged(&self) -> bool {
        !self.fused_pairs.is_empty()
    }
}

pub fn perceive_rings(mol: &Molecule) -> RingPerception {
    RingPerception {
        rings: mol
            .rings()
            .iter()
            .map(|r| RingDescriptor {
                atoms: r.atoms.clone(),
                size: r.size(),
            })
            .collect(),
        atom_ring_sizes: (0..mol.atom_count())
            .map(|i| mol.ring_sizes_of(i).to_vec())
            .collect(),
        fused_pairs: mol.fused_ring_pairs(),
    }
}

/// Canonical SMILES straight from SMILES text.
pub fn canonicalize(smiles: &str) -> Result<String, ChemError> {
    parse_smiles(smiles).map(|m| canonical_smiles(&m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_perception_examples() {
        let cyclohexane = perceive_rings(&parse_smiles("C1CCCCC1").unwrap());
        assert_eq!(cyclohexane.rings.len(), 1);
        assert_eq!(cyclohexane.rings[0].size, 6);

        let bicyclohexyl = perceive_rings(&parse_smiles("C1CCCCC1C1CCCCC1").unwrap());
        assert_eq!(bicyclohexyl.rings.iter().map(|r| r.size).collect::<Vec<_>>(), vec![6, 6]);
        assert!(!bicyclohexyl.has_fused_or_bridged());

        let naphthalene = perceive_rings(&parse_smiles("c1ccc2ccccc2c1").unwrap());
        assert_eq!(naphthalene.rings.len(), 2);
        assert!(naphthalene.rings.iter().all(|r| r.size == 6));
        let shared = naphthalene.rings[0]
            .atoms
            .iter()
            .filter(|a| naphthalene.rings[1].atoms.contains(a))
            .count();
        assert_eq!(shared, 2);
        assert_eq!(naphthalene.fused_pairs, vec![(0, 1)]);
    }

    #[test]
    fn ring_sizes_are_minimal() {
        // Norbornane: 5 + 5, not 5 + 6.
        let m = parse_smiles("C1CC2CCC1C2").unwrap();
        let mut sizes: Vec<usize> = m.rings().iter().map(|r| r.size()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![5, 5]);
        // Cubane: six 4-rings minus one dependent = five 4-rings.
        let cubane = parse_smiles("C12C3C4C1C5C2C3C45").unwrap();
        assert_eq!(cubane.rings().len(), 5);
        assert!(cubane.rings().iter().all(|r| r.size() == 4));
    }
}

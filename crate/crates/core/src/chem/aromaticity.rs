//! Aromaticity perception for Kekulé input and cleanup of lowercase input.
//!
//! A basis ring whose atoms are all sp2 or lone-pair donors is aromatic when
//! its π-electron count is 4n + 2. Rings are re-examined until nothing
//! changes so that fused Kekulé systems (naphthalene) are picked up once a
//! neighbouring ring has been marked.

use super::element::Element;
use super::graph::{Atom, Bond, BondOrder, BondStereo, Ring};
use super::ChemError;

fn pi_electrons(
    ring: &Ring,
    atoms: &[Atom],
    bonds: &[Bond],
    adjacency: &[Vec<(usize, usize)>],
) -> Option<usize> {
    let mut total = 0;
    for &a in &ring.atoms {
        let atom = &atoms[a];
        if atom.aromatic {
            total += match atom.element {
                e if e == Element::C => 1,
                _ => donor_or_one(a, atoms, bonds, adjacency),
            };
            continue;
        }
        let double = adjacency[a]
            .iter()
            .find(|&&(_, b)| bonds[b].order == BondOrder::Double);
        match double {
            Some(&(partner, b)) => {
                if ring.contains_bond(b) || atoms[partner].aromatic {
                    total += 1;
                } else {
                    return None;
                }
            }
            None => {
                let lone_pair = match atom.element.number() {
                    7 => atom.charge == 0 && adjacency[a].len() + atom.implicit_hydrogens as usize == 3,
                    8 | 16 | 34 => atom.charge == 0 && adjacency[a].len() == 2,
                    _ => false,
                };
                if lone_pair
                    && adjacency[a]
                        .iter()
                        .all(|&(_, b)| bonds[b].order == BondOrder::Single)
                {
                    total += 2;
                } else {
                    return None;
                }
            }
        }
    }
    Some(total)
}

fn donor_or_one(a: usize, atoms: &[Atom], _bonds: &[Bond], adjacency: &[Vec<(usize, usize)>]) -> usize {
    let atom = &atoms[a];
    match atom.element.number() {
        7 if adjacency[a].len() + atom.implicit_hydrogens as usize == 3 => 2,
        8 | 16 | 34 => 2,
        _ => 1,
    }
}

pub(crate) fn perceive(
    atoms: &mut [Atom],
    bonds: &mut [Bond],
    rings: &[Ring],
    adjacency: &[Vec<(usize, usize)>],
) -> Result<(), ChemError> {
    let mut aromatic_ring = vec![false; rings.len()];
    for (i, ring) in rings.iter().enumerate() {
        if ring.atoms.iter().all(|&a| atoms[a].aromatic)
            && ring.bonds.iter().all(|&b| bonds[b].order == BondOrder::Aromatic)
        {
            aromatic_ring[i] = true;
        }
    }

    loop {
        let mut changed = false;
        for (i, ring) in rings.iter().enumerate() {
            if aromatic_ring[i] {
                continue;
            }
            if ring.bonds.iter().any(|&b| bonds[b].order == BondOrder::Triple) {
                continue;
            }
            let Some(electrons) = pi_electrons(ring, atoms, bonds, adjacency) else {
                continue;
            };
            if electrons % 4 != 2 {
                continue;
            }
            aromatic_ring[i] = true;
            changed = true;
            for &a in &ring.atoms {
                atoms[a].aromatic = true;
            }
            for &b in &ring.bonds {
                bonds[b].order = BondOrder::Aromatic;
                bonds[b].stereo = BondStereo::None;
                bonds[b].stereo_refs = None;
            }
        }
        if !changed {
            break;
        }
    }

    // Any double bond left between two aromatic atoms inside an aromatic
    // ring has been absorbed; aromatic bonds outside rings revert to single.
    for (bi, bond) in bonds.iter_mut().enumerate() {
        let in_aromatic_ring = rings
            .iter()
            .enumerate()
            .any(|(ri, r)| aromatic_ring[ri] && r.contains_bond(bi));
        if bond.order == BondOrder::Aromatic && !in_aromatic_ring {
            let in_any_ring = rings.iter().any(|r| r.contains_bond(bi));
            if !in_any_ring {
                bond.order = BondOrder::Single;
            }
        }
    }

    for (i, atom) in atoms.iter().enumerate() {
        if atom.aromatic && !rings.iter().any(|r| r.contains_atom(i)) {
            return Err(ChemError::AromaticOutsideRing { atom: i });
        }
    }
    Ok(())
}

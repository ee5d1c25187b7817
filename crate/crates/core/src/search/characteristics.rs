use std::collections::BTreeSet;

use crate::chem::{BondOrder, Element, Molecule};

fn has_double_to(mol: &Molecule, atom: usize, element: Element) -> bool {
    mol.neighbors(atom)
        .iter()
        .any(|&(n, b)| mol.bond(b).order == BondOrder::Double && mol.atom(n).element == element)
}

/// Carbon double-bonded to oxygen.
fn is_carbonyl_carbon(mol: &Molecule, atom: usize) -> bool {
    mol.atom(atom).element == Element::C && has_double_to(mol, atom, Element::O)
}

fn single_neighbors(mol: &Molecule, atom: usize) -> Vec<usize> {
    mol.neighbors(atom)
        .iter()
        .filter(|&&(_, b)| mol.bond(b).order == BondOrder::Single)
        .map(|&(n, _)| n)
        .collect()
}

/// Functional-group tags detected from the structure. Covers alkane,
/// alkene, alkyne, arene, alcohol, ether, aldehyde, ketone, carboxylic
/// acid, ester, amine, nitrile, thiol, thioether and halogen; other
/// vocabulary tags can only be supplied with the record.
pub fn derive_characteristics(mol: &Molecule) -> BTreeSet<String> {
    let mut tags = BTreeSet::new();
    let mut add = |t: &str| {
        tags.insert(t.to_string());
    };
    let only_carbon = mol.atoms().iter().all(|a| a.element == Element::C);
    let mut saturated = true;

    for bond in mol.bonds() {
        let (x, y) = (mol.atom(bond.a), mol.atom(bond.b));
        let both_c = x.element == Element::C && y.element == Element::C;
        match bond.order {
            BondOrder::Double => {
                saturated = false;
                if both_c {
                    add("alkene");
                }
            }
            BondOrder::Triple => {
                saturated = false;
                if both_c {
                    add("alkyne");
                }
                let cn = (x.element == Element::C && y.element == Element::N)
                    || (x.element == Element::N && y.element == Element::C);
                if cn {
                    add("nitrile/isonitrile");
                }
            }
            BondOrder::Aromatic => saturated = false,
            BondOrder::Single => {}
        }
    }
    if mol.atoms().iter().any(|a| a.aromatic && a.element == Element::C) {
        add("arene");
    }
    if only_carbon && saturated {
        add("alkane");
    }

    for (i, atom) in mol.atoms().iter().enumerate() {
        match atom.element {
            e if e.is_halogen() => add("halogen"),
            Element::O if atom.charge == 0 && !atom.aromatic => {
                let singles = single_neighbors(mol, i);
                let carbons: Vec<usize> = singles
                    .iter()
                    .copied()
                    .filter(|&n| mol.atom(n).element == Element::C)
                    .collect();
                if mol.degree(i) == 1 && carbons.len() == 1 && atom.implicit_hydrogens == 1 {
                    if is_carbonyl_carbon(mol, carbons[0]) {
                        add("carboxylic acid");
                    } else {
                        add("alcohol");
                    }
                } else if mol.degree(i) == 2 && carbons.len() == 2 {
                    if carbons.iter().any(|&c| is_carbonyl_carbon(mol, c)) {
                        add("ester");
                    } else {
                        add("ether");
                    }
                }
            }
            Element::O if atom.aromatic => add("ether"),
            Element::C if is_carbonyl_carbon(mol, i) => {
                let others: Vec<usize> = mol
                    .neighbors(i)
                    .iter()
                    .filter(|&&(_, b)| mol.bond(b).order != BondOrder::Double)
                    .map(|&(n, _)| n)
                    .collect();
                if others.iter().all(|&n| mol.atom(n).element == Element::C) {
                    if atom.implicit_hydrogens > 0 {
                        add("aldehyde");
                    } else if others.len() == 2 {
                        add("ketone");
                    }
                }
            }
            Element::N if atom.charge == 0 && !atom.aromatic => {
                let all_single = mol
                    .neighbors(i)
                    .iter()
                    .all(|&(_, b)| mol.bond(b).order == BondOrder::Single);
                let on_carbon = mol.neighbors(i).iter().any(|&(n, _)| mol.atom(n).element == Element::C);
                let acyl = mol.neighbors(i).iter().any(|&(n, _)| is_carbonyl_carbon(mol, n));
                let hetero = mol
                    .neighbors(i)
                    .iter()
                    .any(|&(n, _)| !matches!(mol.atom(n).element.number(), 1 | 6));
                if all_single && on_carbon && !acyl && !hetero {
                    add("amine");
                }
            }
            Element::S if atom.charge == 0 => {
                let singles = single_neighbors(mol, i);
                let carbons = singles.iter().filter(|&&n| mol.atom(n).element == Element::C).count();
                if mol.degree(i) == 1 && carbons == 1 && atom.implicit_hydrogens == 1 {
                    add("thiol");
                } else if mol.degree(i) == 2 && carbons == 2 && atom.implicit_hydrogens == 0 {
                    add("thioether");
                }
            }
            _ => {}
        }
    }
    tags
}

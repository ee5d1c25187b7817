//! Canonical atom ranking and SMILES output.
//!
//! Atoms are first ranked on (element, degree, hydrogen count, smallest
//! ring size, aromaticity, charge), then ranks are refined Morgan-style from
//! sorted neighbour ranks until the partition is stable. Remaining ties are
//! broken by splitting the lowest tied class and refining again. The writer
//! walks the graph depth-first from the lowest rank, visiting neighbours in
//! rank order, so the output depends only on the ranking.
//!
//! Stereo marks and isotopes are not written.

use super::graph::{default_hydrogens, BondOrder, Molecule};

fn dense_rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("key present"))
        .collect()
}

fn class_count(ranks: &[usize]) -> usize {
    let mut r = ranks.to_vec();
    r.sort_unstable();
    r.dedup();
    r.len()
}

fn bond_code(order: BondOrder) -> u8 {
    match order {
        BondOrder::Single => 1,
        BondOrder::Double => 2,
        BondOrder::Triple => 3,
        BondOrder::Aromatic => 4,
    }
}

fn refine(mol: &Molecule, mut ranks: Vec<usize>) -> Vec<usize> {
    let mut classes = class_count(&ranks);
    loop {
        let keys: Vec<(usize, Vec<(usize, u8)>)> = (0..mol.atom_count())
            .map(|i| {
                let mut nb: Vec<(usize, u8)> = mol
                    .neighbors(i)
                    .iter()
                    .map(|&(n, b)| (ranks[n], bond_code(mol.bond(b).order)))
                    .collect();
                nb.sort_unstable();
                (ranks[i], nb)
            })
            .collect();
        let next = dense_rank(&keys);
        let next_classes = class_count(&next);
        ranks = next;
        if next_classes == classes {
            return ranks;
        }
        classes = next_classes;
    }
}

/// Symmetry classes after refinement, before tie breaking. Atoms with equal
/// values are indistinguishable by neighbourhood refinement.
pub fn symmetry_classes(mol: &Molecule) -> Vec<usize> {
    let initial: Vec<_> = mol
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            (
                a.element.number(),
                mol.degree(i),
                a.implicit_hydrogens,
                mol.smallest_ring_of(i).unwrap_or(0),
                a.aromatic,
                a.charge,
            )
        })
        .collect();
    refine(mol, dense_rank(&initial))
}

/// A total order of the atoms; `ranks[i]` is unique per atom.
pub fn canonical_ranks(mol: &Molecule) -> Vec<usize> {
    let n = mol.atom_count();
    let mut ranks = symmetry_classes(mol);
    while class_count(&ranks) < n {
        let mut counts = vec![0usize; n];
        for &r in &ranks {
            counts[r] += 1;
        }
        let tied = (0..n).find(|&r| counts[r] > 1).expect("a tied class exists");
        let chosen = (0..n).find(|&i| ranks[i] == tied).expect("member of tied class");
        let split: Vec<usize> = ranks
            .iter()
            .enumerate()
            .map(|(i, &r)| 2 * r + usize::from(r == tied && i != chosen))
            .collect();
        ranks = refine(mol, dense_rank(&split));
    }
    ranks
}

/// Canonical SMILES: identical for every atom numbering of the same graph.
pub fn canonical_smiles(mol: &Molecule) -> String {
    write_smiles(mol, &canonical_ranks(mol))
}

fn atom_token(mol: &Molecule, i: usize) -> String {
    let atom = mol.atom(i);
    let symbol = atom.element.symbol();
    let default_h = default_hydrogens(atom.element, atom.aromatic, mol.bond_sum(i));
    let plain = atom.element.is_organic_subset()
        && atom.charge == 0
        && default_h == Some(atom.implicit_hydrogens)
        && (!atom.aromatic || atom.element.can_be_aromatic() && symbol.len() == 1);
    let shown = if atom.aromatic {
        symbol.to_ascii_lowercase()
    } else {
        symbol.to_string()
    };
    if plain {
        return shown;
    }
    let mut s = format!("[{shown}");
    match atom.implicit_hydrogens {
        0 => {}
        1 => s.push('H'),
        h => s.push_str(&format!("H{h}")),
    }
    match atom.charge {
        0 => {}
        1 => s.push('+'),
        -1 => s.push('-'),
        c if c > 0 => s.push_str(&format!("+{c}")),
        c => s.push_str(&format!("-{}", -c)),
    }
    s.push(']');
    s
}

fn bond_token(mol: &Molecule, bond: usize) -> &'static str {
    let b = mol.bond(bond);
    let both_aromatic = mol.atom(b.a).aromatic && mol.atom(b.b).aromatic;
    match b.order {
        BondOrder::Single if both_aromatic => "-",
        BondOrder::Single => "",
        BondOrder::Double => "=",
        BondOrder::Triple => "#",
        BondOrder::Aromatic if both_aromatic => "",
        BondOrder::Aromatic => ":",
    }
}

fn digit_token(d: usize) -> String {
    if d < 10 {
        d.to_string()
    } else {
        format!("%{d:02}")
    }
}

/// Write SMILES for `mol` visiting atoms in the order given by `ranks`
/// (lower first). Any distinct ranking yields a valid SMILES for the same
/// graph; [`canonical_smiles`] passes the canonical one.
pub fn write_smiles(mol: &Molecule, ranks: &[usize]) -> String {
    let n = mol.atom_count();
    if n == 0 {
        return String::new();
    }
    let start = (0..n).min_by_key(|&i| ranks[i]).expect("non-empty");

    // Pass 1: DFS tree and ring-closure bonds.
    let mut visited = vec![false; n];
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut openings: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut closings: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut tree_bond = vec![false; mol.bond_count()];
    let mut ring_bond = vec![false; mol.bond_count()];

    let sorted_neighbors = |v: usize| {
        let mut nb: Vec<(usize, usize)> = mol.neighbors(v).to_vec();
        nb.sort_by_key(|&(u, _)| ranks[u]);
        nb
    };

    // (atom, neighbours in rank order, next neighbour to visit)
    type Frame = (usize, Vec<(usize, usize)>, usize);
    let mut stack: Vec<Frame> = vec![(start, sorted_neighbors(start), 0)];
    visited[start] = true;
    while let Some((v, nb, idx)) = stack.last_mut() {
        let v = *v;
        if *idx >= nb.len() {
            stack.pop();
            continue;
        }
        let (u, b) = nb[*idx];
        *idx += 1;
        if tree_bond[b] || ring_bond[b] {
            continue;
        }
        if visited[u] {
            ring_bond[b] = true;
            openings[u].push((v, b));
            closings[v].push((u, b));
        } else {
            tree_bond[b] = true;
            visited[u] = true;
            children[v].push((u, b));
            stack.push((u, sorted_neighbors(u), 0));
        }
    }

    // Pass 2: emit.
    let mut out = String::new();
    let mut free_digits: Vec<bool> = vec![true; 100];
    free_digits[0] = false;
    let mut digit_of_bond = vec![0usize; mol.bond_count()];

    enum Step {
        Atom(usize, Option<usize>),
        Open,
        Close,
    }
    let mut work = vec![Step::Atom(start, None)];
    while let Some(step) = work.pop() {
        match step {
            Step::Open => out.push('('),
            Step::Close => out.push(')'),
            Step::Atom(v, via) => {
                if let Some(b) = via {
                    out.push_str(bond_token(mol, b));
                }
                out.push_str(&atom_token(mol, v));
                let mut opens = openings[v].clone();
                opens.sort_by_key(|&(u, _)| ranks[u]);
                for (_, b) in opens {
                    let d = free_digits.iter().position(|&f| f).expect("ring digits exhausted");
                    free_digits[d] = false;
                    digit_of_bond[b] = d;
                    out.push_str(bond_token(mol, b));
                    out.push_str(&digit_token(d));
                }
                let mut closes = closings[v].clone();
                closes.sort_by_key(|&(_, b)| digit_of_bond[b]);
                for (_, b) in closes {
                    let d = digit_of_bond[b];
                    free_digits[d] = true;
                    out.push_str(&digit_token(d));
                }
                let kids = &children[v];
                // Push in reverse so the first child is emitted first; all
                // but the last child go in parentheses.
                for (k, &(u, b)) in kids.iter().enumerate().rev() {
                    if k + 1 == kids.len() {
                        work.push(Step::Atom(u, Some(b)));
                    } else {
                        work.push(Step::Close);
                        work.push(Step::Atom(u, Some(b)));
                        work.push(Step::Open);
                    }
                }
            }
        }
    }
    out
}

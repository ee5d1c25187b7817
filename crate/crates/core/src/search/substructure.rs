use std::collections::HashMap;

use crate::chem::Molecule;

/// Find one embedding of `query` into `target`: an injective atom map
/// preserving element, aromaticity and bond order on every query bond.
/// Target atoms may carry extra neighbours and hydrogens.
///
/// Query atoms are matched rarest element first, then in an order that
/// keeps each new atom adjacent to one already mapped.
pub fn find_embedding(query: &Molecule, target: &Molecule) -> Option<Vec<usize>> {
    let nq = query.atom_count();
    if nq == 0 {
        return Some(Vec::new());
    }
    if nq > target.atom_count() || query.bond_count() > target.bond_count() {
        return None;
    }
    let mut freq: HashMap<(u8, bool), usize> = HashMap::new();
    for a in target.atoms() {
        *freq.entry((a.element.number(), a.aromatic)).or_default() += 1;
    }
    let rarity = |i: usize| {
        let a = query.atom(i);
        (freq.get(&(a.element.number(), a.aromatic)).copied().unwrap_or(0), usize::MAX - query.degree(i))
    };
    if query.atoms().iter().any(|a| !freq.contains_key(&(a.element.number(), a.aromatic))) {
        return None;
    }

    // Matching order: start from the rarest atom, then repeatedly take the
    // rarest atom adjacent to the placed set.
    let mut order = Vec::with_capacity(nq);
    let mut placed = vec![false; nq];
    while order.len() < nq {
        let next = (0..nq)
            .filter(|&i| !placed[i])
            .filter(|&i| order.is_empty() || query.neighbors(i).iter().any(|&(n, _)| placed[n]))
            .min_by_key(|&i| (rarity(i), i))
            .expect("query is connected");
        placed[next] = true;
        order.push(next);
    }

    let mut map = vec![usize::MAX; nq];
    let mut used = vec![false; target.atom_count()];
    if extend(query, target, &order, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn compatible(query: &Molecule, q: usize, target: &Molecule, t: usize) -> bool {
    let (a, b) = (query.atom(q), target.atom(t));
    a.element == b.element && a.aromatic == b.aromatic && query.degree(q) <= target.degree(t)
}

fn extend(
    query: &Molecule,
    target: &Molecule,
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let q = order[depth];
    // Candidates: neighbours of an already-mapped query neighbour's image,
    // or every target atom for the first query atom.
    let anchor = query.neighbors(q).iter().find(|&&(n, _)| map[n] != usize::MAX);
    let candidates: Vec<usize> = match anchor {
        Some(&(n, _)) => target.neighbors(map[n]).iter().map(|&(t, _)| t).collect(),
        None => (0..target.atom_count()).collect(),
    };
    for t in candidates {
        if used[t] || !compatible(query, q, target, t) {
            continue;
        }
        let bonds_ok = query.neighbors(q).iter().all(|&(n, qb)| {
            map[n] == usize::MAX
                || target
                    .bond_between(t, map[n])
                    .is_some_and(|tb| target.bond(tb).order == query.bond(qb).order)
        });
        if !bonds_ok {
            continue;
        }
        map[q] = t;
        used[t] = true;
        if extend(query, target, order, depth + 1, map, used) {
            return true;
        }
        map[q] = usize::MAX;
        used[t] = false;
    }
    false
}

pub fn is_substructure(query: &Molecule, target: &Molecule) -> bool {
    find_embedding(query, target).is_some()
}

//! Minimum cycle basis by shortest-cycle-first greedy selection.
//!
//! Candidates are the Horton cycles `P(r, x) + (x, y) + P(y, r)` built from
//! BFS shortest paths rooted at every ring atom. They are sorted by length
//! and accepted when independent of the cycles already chosen, with
//! independence tested by Gaussian elimination over GF(2) on edge sets.

use std::collections::{HashSet, VecDeque};

use super::graph::{Bond, Ring};

type EdgeSet = Vec<u64>;

fn words(n_bonds: usize) -> usize {
    n_bonds.div_ceil(64)
}

fn set_bit(set: &mut EdgeSet, i: usize) {
    set[i / 64] ^= 1 << (i % 64);
}

fn leading_bit(set: &EdgeSet) -> Option<usize> {
    set.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn has_bit(set: &EdgeSet, i: usize) -> bool {
    set[i / 64] & (1 << (i % 64)) != 0
}

/// Bonds that lie on at least one cycle (not bridges).
fn cyclic_bonds(n: usize, adjacency: &[Vec<(usize, usize)>], n_bonds: usize) -> Vec<bool> {
    // Tarjan bridge finding, iterative.
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut is_bridge = vec![false; n_bonds];
    let mut time = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(&mut (v, parent_bond, ref mut next)) = stack.last_mut() {
            if *next < adjacency[v].len() {
                let (w, b) = adjacency[v][*next];
                *next += 1;
                if b == parent_bond {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, b, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] > disc[p] {
                        is_bridge[parent_bond] = true;
                    }
                }
            }
        }
    }
    is_bridge.into_iter().map(|b| !b).collect()
}

pub(crate) fn minimum_cycle_basis(
    n_atoms: usize,
    bonds: &[Bond],
    adjacency: &[Vec<(usize, usize)>],
) -> Vec<Ring> {
    let n_bonds = bonds.len();
    let components = {
        let mut seen = vec![false; n_atoms];
        let mut c = 0;
        for s in 0..n_atoms {
            if seen[s] {
                continue;
            }
            c += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &(y, _) in &adjacency[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        c
    };
    let cyclomatic = (n_bonds + components).saturating_sub(n_atoms);
    if cyclomatic == 0 {
        return Vec::new();
    }

    let cyclic = cyclic_bonds(n_atoms, adjacency, n_bonds);
    let ring_atom: Vec<bool> = (0..n_atoms)
        .map(|a| adjacency[a].iter().any(|&(_, b)| cyclic[b]))
        .collect();

    let w = words(n_bonds);
    let mut seen: HashSet<EdgeSet> = HashSet::new();
    let mut candidates: Vec<(usize, EdgeSet)> = Vec::new();

    for root in (0..n_atoms).filter(|&a| ring_atom[a]) {
        // BFS restricted to cyclic bonds.
        let mut dist = vec![usize::MAX; n_atoms];
        let mut parent = vec![(usize::MAX, usize::MAX); n_atoms];
        let mut queue = VecDeque::from([root]);
        dist[root] = 0;
        while let Some(v) = queue.pop_front() {
            for &(u, b) in &adjacency[v] {
                if cyclic[b] && dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    parent[u] = (v, b);
                    queue.push_back(u);
                }
            }
        }
        let path = |mut v: usize| {
            let mut atoms = vec![v];
            let mut edges = Vec::new();
            while v != root {
                let (p, b) = parent[v];
                edges.push(b);
                atoms.push(p);
                v = p;
            }
            (atoms, edges)
        };
        for (bi, bond) in bonds.iter().enumerate() {
            if !cyclic[bi] || dist[bond.a] == usize::MAX || dist[bond.b] == usize::MAX {
                continue;
            }
            // Skip tree edges of this BFS.
            if parent[bond.a].1 == bi || parent[bond.b].1 == bi {
                continue;
            }
            let (pa, ea) = path(bond.a);
            let (pb, eb) = path(bond.b);
            let shared = pa.iter().filter(|x| pb.contains(x)).count();
            if shared != 1 {
                continue;
            }
            let mut set = vec![0u64; w];
            for &e in ea.iter().chain(eb.iter()) {
                set_bit(&mut set, e);
            }
            set_bit(&mut set, bi);
            let len = ea.len() + eb.len() + 1;
            if seen.insert(set.clone()) {
                candidates.push((len, set));
            }
        }
    }
    candidates.sort();

    let mut reduced: Vec<(usize, EdgeSet)> = Vec::new();
    let mut chosen: Vec<EdgeSet> = Vec::new();
    for (_, cand) in candidates {
        let mut v = cand.clone();
        for (pivot, row) in &reduced {
            if has_bit(&v, *pivot) {
                for (x, y) in v.iter_mut().zip(row) {
                    *x ^= *y;
                }
            }
        }
        if let Some(pivot) = leading_bit(&v) {
            // Keep rows fully reduced on their pivot columns.
            for (_, row) in reduced.iter_mut() {
                if has_bit(row, pivot) {
                    for (x, y) in row.iter_mut().zip(&v) {
                        *x ^= *y;
                    }
                }
            }
            reduced.push((pivot, v));
            chosen.push(cand);
            if chosen.len() == cyclomatic {
                break;
            }
        }
    }

    chosen
        .into_iter()
        .map(|set| order_cycle(&set, bonds, n_bonds))
        .collect()
}

fn order_cycle(set: &EdgeSet, bonds: &[Bond], n_bonds: usize) -> Ring {
    let edges: Vec<usize> = (0..n_bonds).filter(|&i| has_bit(set, i)).collect();
    let start = edges
        .iter()
        .map(|&e| bonds[e].a.min(bonds[e].b))
        .min()
        .expect("non-empty cycle");
    let mut atoms = vec![start];
    let mut ordered_bonds = Vec::with_capacity(edges.len());
    let mut used = vec![false; edges.len()];
    let mut current = start;
    for _ in 0..edges.len() {
        let next = edges
            .iter()
            .enumerate()
            .filter(|(k, &e)| !used[*k] && (bonds[e].a == current || bonds[e].b == current))
            .min_by_key(|(_, &e)| bonds[e].other(current));
        let Some((k, &e)) = next else { break };
        used[k] = true;
        ordered_bonds.push(e);
        current = bonds[e].other(current);
        if current != start {
            atoms.push(current);
        }
    }
    Ring {
        atoms,
        bonds: ordered_bonds,
    }
}

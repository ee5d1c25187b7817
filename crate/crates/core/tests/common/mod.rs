//! Helpers shared by the integration tests: a seeded random molecule
//! generator, atom renumbering, and a brute-force embedding oracle.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use therminfo_core::chem::{BondOrder, Molecule};

pub const CANONICALIZATION_FIXTURE: &str = include_str!("../../data/fixtures/canonicalization.smi");

/// (smiles, name) pairs of the canonicalization fixture.
pub fn canonicalization_fixture() -> Vec<(&'static str, &'static str)> {
    CANONICALIZATION_FIXTURE
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split_once('\t').expect("tab-separated fixture line"))
        .collect()
}

pub fn random_permutation<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

#[derive(Debug, Clone, Copy)]
pub struct GenOptions {
    /// Aliphatic carbons, at least one.
    pub max_carbons: usize,
    pub max_rings: usize,
    /// Probability of attaching a phenyl ring.
    pub phenyl: f64,
    /// Probability that a bond is upgraded to a double bond.
    pub unsaturation: f64,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            max_carbons: 10,
            max_rings: 2,
            phenyl: 0.25,
            unsaturation: 0.08,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Edge {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl Edge {
    fn order(self) -> usize {
        match self {
            Edge::Single | Edge::Aromatic => 1,
            Edge::Double => 2,
            Edge::Triple => 3,
        }
    }
}

/// Undirected graph of carbons, emitted as SMILES.
struct Graph {
    aromatic: Vec<bool>,
    edges: Vec<(usize, usize, Edge)>,
}

impl Graph {
    fn add_atom(&mut self, aromatic: bool) -> usize {
        self.aromatic.push(aromatic);
        self.aromatic.len() - 1
    }

    fn neighbors(&self, v: usize) -> Vec<(usize, Edge)> {
        self.edges
            .iter()
            .filter_map(|&(a, b, e)| {
                if a == v {
                    Some((b, e))
                } else if b == v {
                    Some((a, e))
                } else {
                    None
                }
            })
            .collect()
    }

    fn bonded(&self, x: usize, y: usize) -> bool {
        self.edges.iter().any(|&(a, b, _)| (a, b) == (x, y) || (a, b) == (y, x))
    }

    /// Remaining valence: 4 for an aliphatic carbon, 3 for an aromatic one.
    fn free(&self, v: usize) -> usize {
        let cap: usize = if self.aromatic[v] { 3 } else { 4 };
        let used: usize = self.neighbors(v).iter().map(|(_, e)| e.order()).sum();
        cap.saturating_sub(used)
    }

    fn distance(&self, from: usize, to: usize) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.aromatic.len()];
        let mut queue = std::collections::VecDeque::from([from]);
        dist[from] = 0;
        while let Some(v) = queue.pop_front() {
            for (n, _) in self.neighbors(v) {
                if dist[n] == usize::MAX {
                    dist[n] = dist[v] + 1;
                    queue.push_back(n);
                }
            }
        }
        (dist[to] != usize::MAX).then_some(dist[to])
    }

    fn to_smiles(&self) -> String {
        let n = self.aromatic.len();
        let mut visited = vec![false; n];
        let mut children: Vec<Vec<(usize, Edge)>> = vec![Vec::new(); n];
        let mut closures: Vec<(usize, usize, Edge)> = Vec::new();
        let mut stack = vec![(0usize, usize::MAX)];
        let mut order = Vec::new();
        // Iterative DFS recording the tree in visiting order.
        while let Some((v, parent)) = stack.pop() {
            if visited[v] {
                continue;
            }
            visited[v] = true;
            order.push(v);
            if parent != usize::MAX {
                let e = self.neighbors(v).into_iter().find(|&(p, _)| p == parent).unwrap().1;
                children[parent].push((v, e));
            }
            for (w, _) in self.neighbors(v).into_iter().rev() {
                if !visited[w] {
                    stack.push((w, v));
                }
            }
        }
        let tree: Vec<(usize, usize)> = children
            .iter()
            .enumerate()
            .flat_map(|(p, cs)| cs.iter().map(move |&(c, _)| (p, c)))
            .collect();
        for &(a, b, e) in &self.edges {
            if !tree.contains(&(a, b)) && !tree.contains(&(b, a)) {
                closures.push((a, b, e));
            }
        }
        let pos: Vec<usize> = {
            let mut p = vec![0; n];
            for (i, &v) in order.iter().enumerate() {
                p[v] = i;
            }
            p
        };
        let mut out = String::new();
        let mut digits: Vec<Option<(usize, usize)>> = vec![None; 10];
        self.emit(0, &children, &closures, &pos, &mut digits, &mut out);
        out
    }

    fn bond_symbol(&self, a: usize, b: usize, e: Edge) -> &'static str {
        match e {
            Edge::Double => "=",
            Edge::Triple => "#",
            Edge::Aromatic => "",
            Edge::Single if self.aromatic[a] && self.aromatic[b] => "-",
            Edge::Single => "",
        }
    }

    fn emit(
        &self,
        v: usize,
        children: &[Vec<(usize, Edge)>],
        closures: &[(usize, usize, Edge)],
        pos: &[usize],
        digits: &mut [Option<(usize, usize)>],
        out: &mut String,
    ) {
        out.push_str(if self.aromatic[v] { "c" } else { "C" });
        let mut mine: Vec<(usize, usize, Edge)> = closures
            .iter()
            .filter(|&&(a, b, _)| a == v || b == v)
            .map(|&(a, b, e)| if a == v { (a, b, e) } else { (b, a, e) })
            .collect();
        mine.sort_by_key(|&(_, other, _)| pos[other]);
        for (a, b, e) in mine {
            let key = (a.min(b), a.max(b));
            if let Some(d) = digits.iter().position(|slot| *slot == Some(key)) {
                digits[d] = None;
                out.push_str(&format!("{d}"));
            } else {
                let d = (1..10).find(|&d| digits[d].is_none()).expect("free ring digit");
                digits[d] = Some(key);
                out.push_str(self.bond_symbol(a, b, e));
                out.push_str(&format!("{d}"));
            }
        }
        let kids = &children[v];
        for (i, &(c, e)) in kids.iter().enumerate() {
            let last = i + 1 == kids.len();
            if !last {
                out.push('(');
            }
            out.push_str(self.bond_symbol(v, c, e));
            self.emit(c, children, closures, pos, digits, out);
            if !last {
                out.push(')');
            }
        }
    }
}

/// A random connected hydrocarbon as SMILES. Rings may fuse; callers that
/// need in-domain structures filter with `check_domain`.
pub fn random_hydrocarbon<R: Rng>(rng: &mut R, opts: &GenOptions) -> String {
    let mut g = Graph {
        aromatic: Vec::new(),
        edges: Vec::new(),
    };
    let n = rng.random_range(1..=opts.max_carbons.max(1));
    g.add_atom(false);
    for _ in 1..n {
        let open: Vec<usize> = (0..g.aromatic.len()).filter(|&v| g.free(v) > 0).collect();
        let parent = open[rng.random_range(0..open.len())];
        let v = g.add_atom(false);
        g.edges.push((parent, v, Edge::Single));
    }
    for _ in 0..rng.random_range(0..=opts.max_rings) {
        let atoms = g.aromatic.len();
        let pairs: Vec<(usize, usize)> = (0..atoms)
            .flat_map(|a| (a + 1..atoms).map(move |b| (a, b)))
            .filter(|&(a, b)| g.free(a) > 0 && g.free(b) > 0 && !g.bonded(a, b))
            .filter(|&(a, b)| matches!(g.distance(a, b), Some(d) if (2..=7).contains(&d)))
            .collect();
        if let Some(&(a, b)) = pairs.get(rng.random_range(0..pairs.len().max(1))) {
            g.edges.push((a, b, Edge::Single));
        }
    }
    for i in 0..g.edges.len() {
        let (a, b, _) = g.edges[i];
        if rng.random_bool(opts.unsaturation) && g.free(a) > 0 && g.free(b) > 0 {
            g.edges[i].2 = Edge::Double;
        }
    }
    if rng.random_bool(opts.phenyl) {
        let open: Vec<usize> = (0..g.aromatic.len()).filter(|&v| g.free(v) > 0).collect();
        if let Some(&anchor) = open.get(rng.random_range(0..open.len().max(1))) {
            let ring: Vec<usize> = (0..6).map(|_| g.add_atom(true)).collect();
            for k in 0..6 {
                g.edges.push((ring[k], ring[(k + 1) % 6], Edge::Aromatic));
            }
            g.edges.push((anchor, ring[0], Edge::Single));
        }
    }
    g.to_smiles()
}

/// Whether `query` embeds into `target`: an injective map of query atoms to
/// target atoms with equal element and aromaticity such that every query
/// bond lands on a target bond of the same order. Plain depth-first
/// enumeration over query atoms in index order.
pub fn brute_force_embeds(query: &Molecule, target: &Molecule) -> bool {
    fn order_between(m: &Molecule, x: usize, y: usize) -> Option<BondOrder> {
        m.bonds()
            .iter()
            .find(|b| (b.a == x && b.b == y) || (b.a == y && b.b == x))
            .map(|b| b.order)
    }
    fn extend(q: &Molecule, t: &Molecule, map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let i = map.len();
        if i == q.atom_count() {
            return true;
        }
        let qa = q.atom(i);
        for j in 0..t.atom_count() {
            let ta = t.atom(j);
            if used[j] || ta.element != qa.element || ta.aromatic != qa.aromatic {
                continue;
            }
            let fits = (0..i).all(|k| match order_between(q, i, k) {
                None => true,
                Some(order) => order_between(t, j, map[k]) == Some(order),
            });
            if !fits {
                continue;
            }
            used[j] = true;
            map.push(j);
            if extend(q, t, map, used) {
                return true;
            }
            map.pop();
            used[j] = false;
        }
        false
    }
    if query.atom_count() > target.atom_count() {
        return false;
    }
    extend(query, target, &mut Vec::new(), &mut vec![false; target.atom_count()])
}

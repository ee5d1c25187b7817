use serde::{Deserialize, Serialize};

use crate::chem::{BondOrder, Molecule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintConfig {
    /// Bit width, a power of two.
    pub width: usize,
    /// Longest path hashed, in atoms.
    pub max_path_atoms: usize,
}

impl Default for FingerprintConfig {
    fn default() -> Self {
        FingerprintConfig {
            width: 1024,
            max_path_atoms: 7,
        }
    }
}

/// Fixed-width bit set of hashed linear paths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    words: Vec<u64>,
}

impl Fingerprint {
    pub fn empty(width: usize) -> Self {
        assert!(width.is_power_of_two() && width >= 64, "width must be a power of two ≥ 64");
        Fingerprint {
            words: vec![0; width / 64],
        }
    }

    pub fn width(&self) -> usize {
        self.words.len() * 64
    }

    pub fn set(&mut self, bit: usize) {
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn get(&self, bit: usize) -> bool {
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Every bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Fingerprint) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width()).filter(|&i| self.get(i))
    }
}

/// |A ∩ B| / |A ∪ B|; two empty sets score 0.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> f64 {
    let (mut both, mut either) = (0u32, 0u32);
    for (x, y) in a.words.iter().zip(&b.words) {
        both += (x & y).count_ones();
        either += (x | y).count_ones();
    }
    if either == 0 {
        0.0
    } else {
        both as f64 / either as f64
    }
}

fn atom_label(mol: &Molecule, i: usize) -> u8 {
    let a = mol.atom(i);
    a.element.number().wrapping_mul(2) | u8::from(a.aromatic)
}

fn bond_label(order: BondOrder) -> u8 {
    match order {
        BondOrder::Single => 1,
        BondOrder::Double => 2,
        BondOrder::Triple => 3,
        BondOrder::Aromatic => 4,
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Key of a closed path: the cyclic label sequence `[atom, bond, atom, ...]`
/// in its smallest rotation or reflection, behind a ring marker.
fn ring_key(cycle: &[u8]) -> Vec<u8> {
    let n = cycle.len();
    let mut best: Option<Vec<u8>> = None;
    let reflected: Vec<u8> = {
        // Reverse the atom order; each bond stays between its two atoms.
        let atoms = n / 2;
        let mut out = Vec::with_capacity(n);
        for i in 0..atoms {
            let a = (atoms - i) % atoms;
            out.push(cycle[2 * a]);
            out.push(cycle[(2 * a + n - 1) % n]);
        }
        out
    };
    for seq in [cycle, reflected.as_slice()] {
        for start in (0..n).step_by(2) {
            let rotated: Vec<u8> = seq[start..].iter().chain(&seq[..start]).copied().collect();
            if best.as_ref().is_none_or(|b| rotated < *b) {
                best = Some(rotated);
            }
        }
    }
    let mut key = vec![0xff, (n / 2) as u8];
    key.extend(best.unwrap_or_default());
    key
}

/// Key of a branch point: the centre label followed by the sorted
/// `(bond, atom)` labels of the chosen neighbours.
fn star_key(centre: u8, arms: &[(u8, u8)]) -> Vec<u8> {
    let mut arms = arms.to_vec();
    arms.sort_unstable();
    let mut key = vec![0xfe, arms.len() as u8, centre];
    key.extend(arms.iter().flat_map(|&(b, a)| [b, a]));
    key
}

/// Every 3- and 4-subset of an atom's neighbours. Subsets rather than the
/// full neighbourhood keep the bits of an embedded query inside the bits
/// of its target.
fn set_star_bits(mol: &Molecule, atom: usize, mask: usize, fp: &mut Fingerprint) {
    let arms: Vec<(u8, u8)> = mol
        .neighbors(atom)
        .iter()
        .map(|&(n, b)| (bond_label(mol.bond(b).order), atom_label(mol, n)))
        .collect();
    let centre = atom_label(mol, atom);
    let d = arms.len();
    for i in 0..d {
        for j in i + 1..d {
            for k in j + 1..d {
                fp.set(fnv1a(&star_key(centre, &[arms[i], arms[j], arms[k]])) as usize & mask);
                for l in k + 1..d {
                    fp.set(fnv1a(&star_key(centre, &[arms[i], arms[j], arms[k], arms[l]])) as usize & mask);
                }
            }
        }
    }
}

/// Hash every simple path of 1..=max_path_atoms atoms, labelled by element,
/// aromaticity and bond order, every ring of at most max_path_atoms atoms
/// as a separate closed fragment, and every branch point. A path and its
/// reverse set the same bit, so the result depends only on the graph.
pub fn fingerprint(mol: &Molecule, config: &FingerprintConfig) -> Fingerprint {
    let mut walker = Walker {
        mol,
        max: config.max_path_atoms,
        mask: config.width - 1,
        labels: Vec::with_capacity(2 * config.max_path_atoms),
        path: Vec::with_capacity(config.max_path_atoms),
        on_path: vec![false; mol.atom_count()],
        fp: Fingerprint::empty(config.width),
    };
    for start in 0..mol.atom_count() {
        walker.walk(start);
    }
    let mut fp = walker.fp;
    for atom in 0..mol.atom_count() {
        set_star_bits(mol, atom, config.width - 1, &mut fp);
    }
    fp
}

struct Walker<'a> {
    mol: &'a Molecule,
    max: usize,
    mask: usize,
    labels: Vec<u8>,
    path: Vec<usize>,
    on_path: Vec<bool>,
    fp: Fingerprint,
}

impl Walker<'_> {
    fn walk(&mut self, atom: usize) {
        let mol = self.mol;
        self.labels.push(atom_label(mol, atom));
        self.path.push(atom);
        self.on_path[atom] = true;
        let reversed: Vec<u8> = self.labels.iter().rev().copied().collect();
        let key = if reversed < self.labels { &reversed } else { &self.labels };
        self.fp.set(fnv1a(key) as usize & self.mask);
        if self.path.len() >= 3 {
            if let Some(b) = mol.bond_between(atom, self.path[0]) {
                let mut cycle = self.labels.clone();
                cycle.push(bond_label(mol.bond(b).order));
                self.fp.set(fnv1a(&ring_key(&cycle)) as usize & self.mask);
            }
        }
        if self.path.len() < self.max {
            for &(n, b) in mol.neighbors(atom) {
                if !self.on_path[n] {
                    self.labels.push(bond_label(mol.bond(b).order));
                    self.walk(n);
                    self.labels.pop();
                }
            }
        }
        self.on_path[atom] = false;
        self.path.pop();
        self.labels.pop();
    }
}

//! Immutable molecular graph with implicit hydrogens, aromatic flags and
//! a minimum cycle basis.

use serde::{Deserialize, Serialize};

use super::element::Element;
use super::{aromaticity, rings, ChemError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Integer contribution to an atom's valence. Aromatic bonds count as
    /// one; the extra half-bond is added per atom, see [`default_hydrogens`].
    pub fn valence(self) -> u8 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondStereo {
    None,
    Cis,
    Trans,
    Unspecified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub element: Element,
    pub aromatic: bool,
    pub implicit_hydrogens: u8,
    pub charge: i8,
    pub isotope: Option<u16>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
    pub stereo: BondStereo,
    /// Reference substituents `(on a, on b)` that `stereo` describes.
    pub stereo_refs: Option<(usize, usize)>,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }

    pub fn joins(&self, x: usize, y: usize) -> bool {
        (self.a == x && self.b == y) || (self.a == y && self.b == x)
    }
}

/// One ring of the minimum cycle basis, atoms listed in cycle order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ring {
    pub atoms: Vec<usize>,
    pub bonds: Vec<usize>,
}

impl Ring {
    pub fn size(&self) -> usize {
        self.atoms.len()
    }

    pub fn contains_atom(&self, atom: usize) -> bool {
        self.atoms.contains(&atom)
    }

    pub fn contains_bond(&self, bond: usize) -> bool {
        self.bonds.contains(&bond)
    }
}

#[derive(Debug, Clone)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    rings: Vec<Ring>,
    adjacency: Vec<Vec<(usize, usize)>>,
    atom_ring_sizes: Vec<Vec<usize>>,
}

/// Hydrogen count an unbracketed atom receives from its lowest fitting
/// valence, or `None` when the explicit bonds exceed every valence.
///
/// `bond_sum` counts aromatic bonds as one. Aromatic B, C, N, P and As
/// first try an extra unit for the delocalised bond.
pub fn default_hydrogens(element: Element, aromatic: bool, bond_sum: u8) -> Option<u8> {
    let valences = element.valences();
    if valences.is_empty() {
        return Some(0);
    }
    let fit = |used: u8| valences.iter().find(|&&v| v >= used).map(|&v| v - used);
    if aromatic && matches!(element.number(), 5 | 6 | 7 | 15 | 33) {
        if let Some(h) = fit(bond_sum + 1) {
            return Some(h);
        }
    }
    fit(bond_sum)
}

impl Molecule {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn bond(&self, i: usize) -> &Bond {
        &self.bonds[i]
    }

    /// `(neighbor atom, bond index)` pairs.
    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn bond_between(&self, x: usize, y: usize) -> Option<usize> {
        self.adjacency[x].iter().find(|&&(n, _)| n == y).map(|&(_, b)| b)
    }

    /// Sizes of all basis rings containing `atom`, ascending.
    pub fn ring_sizes_of(&self, atom: usize) -> &[usize] {
        &self.atom_ring_sizes[atom]
    }

    pub fn smallest_ring_of(&self, atom: usize) -> Option<usize> {
        self.atom_ring_sizes[atom].first().copied()
    }

    pub fn in_ring(&self, atom: usize) -> bool {
        !self.atom_ring_sizes[atom].is_empty()
    }

    pub fn bond_in_ring(&self, bond: usize) -> bool {
        self.rings.iter().any(|r| r.contains_bond(bond))
    }

    /// Sum of integer bond valences at `atom` (aromatic bonds count one).
    pub fn bond_sum(&self, atom: usize) -> u8 {
        self.adjacency[atom]
            .iter()
            .map(|&(_, b)| self.bonds[b].order.valence())
            .sum()
    }

    pub fn total_hydrogens(&self) -> usize {
        self.atoms.iter().map(|a| a.implicit_hydrogens as usize).sum()
    }

    /// Pairs of basis rings that share at least one atom.
    pub fn fused_ring_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.rings.len() {
            for j in i + 1..self.rings.len() {
                if self.rings[i].atoms.iter().any(|a| self.rings[j].contains_atom(*a)) {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    /// Copy of this molecule with atom `i` moved to position `perm[i]`.
    pub fn renumbered(&self, perm: &[usize]) -> Molecule {
        assert_eq!(perm.len(), self.atoms.len(), "permutation length");
        let mut atoms = vec![None; self.atoms.len()];
        for (old, atom) in self.atoms.iter().enumerate() {
            atoms[perm[old]] = Some(atom.clone());
        }
        let atoms: Vec<Atom> = atoms.into_iter().map(|a| a.expect("permutation")).collect();
        let bonds: Vec<Bond> = self
            .bonds
            .iter()
            .map(|b| Bond {
                a: perm[b.a],
                b: perm[b.b],
                order: b.order,
                stereo: b.stereo,
                stereo_refs: b.stereo_refs.map(|(x, y)| (perm[x], perm[y])),
            })
            .collect();
        Molecule::assemble(atoms, bonds)
    }

    fn assemble(atoms: Vec<Atom>, bonds: Vec<Bond>) -> Molecule {
        let adjacency = adjacency_of(atoms.len(), &bonds);
        let rings = rings::minimum_cycle_basis(atoms.len(), &bonds, &adjacency);
        let atom_ring_sizes = ring_sizes(atoms.len(), &rings);
        Molecule {
            atoms,
            bonds,
            rings,
            adjacency,
            atom_ring_sizes,
        }
    }
}

fn adjacency_of(n: usize, bonds: &[Bond]) -> Vec<Vec<(usize, usize)>> {
    let mut adjacency = vec![Vec::new(); n];
    for (i, b) in bonds.iter().enumerate() {
        adjacency[b.a].push((b.b, i));
        adjacency[b.b].push((b.a, i));
    }
    adjacency
}

fn ring_sizes(n: usize, rings: &[Ring]) -> Vec<Vec<usize>> {
    let mut sizes = vec![Vec::new(); n];
    for ring in rings {
        for &a in &ring.atoms {
            sizes[a].push(ring.size());
        }
    }
    for s in &mut sizes {
        s.sort_unstable();
    }
    sizes
}

/// Atom under construction; `hydrogens: None` means "derive from the
/// default valence once all bonds are known".
#[derive(Debug, Clone)]
pub struct AtomSpec {
    pub element: Element,
    pub aromatic: bool,
    pub hydrogens: Option<u8>,
    pub charge: i8,
    pub isotope: Option<u16>,
    /// Byte offset in the source text, for error reporting.
    pub position: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone)]
pub struct BondSpec {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
    /// `/` or `\` mark, read in the a → b direction.
    pub direction: Option<Direction>,
}

/// Collects atoms and bonds from a parser and validates them into a
/// [`Molecule`].
#[derive(Debug, Default, Clone)]
pub struct MoleculeBuilder {
    pub atoms: Vec<AtomSpec>,
    pub bonds: Vec<BondSpec>,
}

impl MoleculeBuilder {
    pub fn add_atom(&mut self, atom: AtomSpec) -> usize {
        self.atoms.push(atom);
        self.atoms.len() - 1
    }

    pub fn add_bond(&mut self, bond: BondSpec) -> Result<usize, ChemError> {
        let n = self.atoms.len();
        if bond.a >= n || bond.b >= n {
            return Err(ChemError::InvalidBond {
                message: format!("bond {}-{} references a missing atom", bond.a + 1, bond.b + 1),
            });
        }
        if bond.a == bond.b {
            return Err(ChemError::InvalidBond {
                message: format!("atom {} bonded to itself", bond.a + 1),
            });
        }
        if self
            .bonds
            .iter()
            .any(|b| (b.a == bond.a && b.b == bond.b) || (b.a == bond.b && b.b == bond.a))
        {
            return Err(ChemError::InvalidBond {
                message: format!("duplicate bond between atoms {} and {}", bond.a + 1, bond.b + 1),
            });
        }
        self.bonds.push(bond);
        Ok(self.bonds.len() - 1)
    }

    /// Validate and freeze. Multi-fragment input is rejected.
    pub fn build(self) -> Result<Molecule, ChemError> {
        if self.atoms.is_empty() {
            return Err(ChemError::Empty);
        }
        let n = self.atoms.len();
        let mut bond_sum = vec![0u8; n];
        for b in &self.bonds {
            bond_sum[b.a] = bond_sum[b.a].saturating_add(b.order.valence());
            bond_sum[b.b] = bond_sum[b.b].saturating_add(b.order.valence());
        }

        let mut atoms = Vec::with_capacity(n);
        for (i, spec) in self.atoms.iter().enumerate() {
            let hydrogens = match spec.hydrogens {
                Some(h) => {
                    check_bracket_valence(spec, bond_sum[i], h, i)?;
                    h
                }
                None => default_hydrogens(spec.element, spec.aromatic, bond_sum[i]).ok_or(
                    ChemError::Valence {
                        atom: i,
                        element: spec.element.symbol().to_string(),
                        position: spec.position,
                    },
                )?,
            };
            atoms.push(Atom {
                element: spec.element,
                aromatic: spec.aromatic,
                implicit_hydrogens: hydrogens,
                charge: spec.charge,
                isotope: spec.isotope,
            });
        }

        let bonds: Vec<Bond> = self
            .bonds
            .iter()
            .map(|b| Bond {
                a: b.a,
                b: b.b,
                order: b.order,
                stereo: BondStereo::None,
                stereo_refs: None,
            })
            .collect();

        let (atoms, bonds, directions) = suppress_hydrogens(atoms, bonds, &self.bonds);

        let adjacency = adjacency_of(atoms.len(), &bonds);
        let fragments = count_fragments(atoms.len(), &adjacency);
        if fragments > 1 {
            return Err(ChemError::Disconnected { fragments });
        }

        let mut atoms = atoms;
        let mut bonds = bonds;
        let ring_set = rings::minimum_cycle_basis(atoms.len(), &bonds, &adjacency);
        aromaticity::perceive(&mut atoms, &mut bonds, &ring_set, &adjacency)?;
        assign_double_bond_stereo(&atoms, &mut bonds, &adjacency, &directions);

        let atom_ring_sizes = ring_sizes(atoms.len(), &ring_set);
        Ok(Molecule {
            atoms,
            bonds,
            rings: ring_set,
            adjacency,
            atom_ring_sizes,
        })
    }
}

fn check_bracket_valence(spec: &AtomSpec, bond_sum: u8, h: u8, index: usize) -> Result<(), ChemError> {
    // Only carbon gets a hard ceiling; other bracket atoms are trusted as written.
    if spec.element == Element::C {
        let aromatic_extra = u8::from(spec.aromatic);
        let used = bond_sum as i32 + aromatic_extra as i32 + h as i32 + (spec.charge as i32).abs();
        if used > 4 {
            return Err(ChemError::Valence {
                atom: index,
                element: "C".into(),
                position: spec.position,
            });
        }
    }
    Ok(())
}

/// Fold plain `[H]` atoms bonded to a heavy atom into that atom's
/// implicit-hydrogen count. Returns the surviving atoms, bonds and the
/// directional marks remapped onto the surviving bond list.
fn suppress_hydrogens(
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    specs: &[BondSpec],
) -> (Vec<Atom>, Vec<Bond>, Vec<Option<Direction>>) {
    let n = atoms.len();
    let mut degree = vec![0usize; n];
    for b in &bonds {
        degree[b.a] += 1;
        degree[b.b] += 1;
    }
    let mut removable = vec![false; n];
    let mut atoms = atoms;
    for b in &bonds {
        for (h, heavy) in [(b.a, b.b), (b.b, b.a)] {
            let ha = &atoms[h];
            if ha.element == Element::H
                && ha.charge == 0
                && ha.isotope.is_none()
                && ha.implicit_hydrogens == 0
                && degree[h] == 1
                && atoms[heavy].element != Element::H
                && b.order == BondOrder::Single
            {
                removable[h] = true;
            }
        }
    }
    if !removable.iter().any(|&r| r) {
        let dirs = specs.iter().map(|s| s.direction).collect();
        return (atoms, bonds, dirs);
    }
    for b in &bonds {
        if removable[b.a] {
            atoms[b.b].implicit_hydrogens += 1;
        } else if removable[b.b] {
            atoms[b.a].implicit_hydrogens += 1;
        }
    }
    let mut new_index = vec![usize::MAX; n];
    let mut kept = Vec::new();
    for (i, atom) in atoms.into_iter().enumerate() {
        if !removable[i] {
            new_index[i] = kept.len();
            kept.push(atom);
        }
    }
    let mut new_bonds = Vec::new();
    let mut dirs = Vec::new();
    for (b, spec) in bonds.into_iter().zip(specs) {
        if removable[b.a] || removable[b.b] {
            continue;
        }
        new_bonds.push(Bond {
            a: new_index[b.a],
            b: new_index[b.b],
            ..b
        });
        dirs.push(spec.direction);
    }
    (kept, new_bonds, dirs)
}

fn count_fragments(n: usize, adjacency: &[Vec<(usize, usize)>]) -> usize {
    let mut seen = vec![false; n];
    let mut fragments = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        fragments += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            for &(y, _) in &adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    fragments
}

/// Direction of the substituent bond at `center`, normalised to read
/// "from substituent toward center".
fn toward(center: usize, bond: &Bond, dir: Direction) -> Direction {
    if bond.b == center {
        dir
    } else {
        flip(dir)
    }
}

fn from_center(center: usize, bond: &Bond, dir: Direction) -> Direction {
    if bond.a == center {
        dir
    } else {
        flip(dir)
    }
}

fn flip(d: Direction) -> Direction {
    match d {
        Direction::Up => Direction::Down,
        Direction::Down => Direction::Up,
    }
}

fn assign_double_bond_stereo(
    atoms: &[Atom],
    bonds: &mut [Bond],
    adjacency: &[Vec<(usize, usize)>],
    directions: &[Option<Direction>],
) {
    let _ = atoms;
    for i in 0..bonds.len() {
        if bonds[i].order != BondOrder::Double {
            continue;
        }
        let (x, y) = (bonds[i].a, bonds[i].b);
        let marked = |center: usize, partner: usize| {
            adjacency[center]
                .iter()
                .filter(|&&(n, _)| n != partner)
                .find_map(|&(n, b)| directions[b].map(|d| (n, b, d)))
        };
        bonds[i].stereo = BondStereo::Unspecified;
        if let (Some((sx, bx, dx)), Some((sy, by, dy))) = (marked(x, y), marked(y, x)) {
            // F/C=C/F: both marks read the same way along the chain → trans.
            let left = toward(x, &bonds[bx], dx);
            let right = from_center(y, &bonds[by], dy);
            bonds[i].stereo = if left == right {
                BondStereo::Trans
            } else {
                BondStereo::Cis
            };
            bonds[i].stereo_refs = Some((sx, sy));
        }
    }
}

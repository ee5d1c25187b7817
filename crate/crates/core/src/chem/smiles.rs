//! SMILES reader.
//!
//! Supports the organic subset, bracket atoms (isotope, chirality marks,
//! hydrogen count, charge, atom class), branches, ring closures including
//! `%nn`, explicit bond symbols and `/` `\` double-bond marks. Chirality is
//! read and discarded. The `.` separator is rejected: a record holds one
//! compound.

use std::collections::BTreeMap;

use super::element::Element;
use super::graph::{AtomSpec, BondOrder, BondSpec, Direction, Molecule, MoleculeBuilder};
use super::ChemError;

const MAX_INPUT: usize = 4096;

#[derive(Debug, Clone, Copy)]
struct PendingBond {
    order: Option<BondOrder>,
    direction: Option<Direction>,
}

struct RingOpen {
    atom: usize,
    bond: PendingBond,
    position: usize,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    builder: MoleculeBuilder,
    branch_stack: Vec<usize>,
    previous: Option<usize>,
    pending: Option<PendingBond>,
    rings: BTreeMap<u32, RingOpen>,
}

/// Parse a SMILES string into a validated molecule.
pub fn parse_smiles(input: &str) -> Result<Molecule, ChemError> {
    if input.is_empty() || input.trim().is_empty() {
        return Err(ChemError::Empty);
    }
    if !input.is_ascii() {
        let position = input.char_indices().find(|(_, c)| !c.is_ascii()).map_or(0, |(i, _)| i);
        return Err(ChemError::Syntax {
            position,
            message: "non-ASCII character".into(),
        });
    }
    if input.len() > MAX_INPUT {
        return Err(ChemError::Syntax {
            position: MAX_INPUT,
            message: format!("input longer than {MAX_INPUT} characters"),
        });
    }
    let mut parser = Parser {
        src: input.trim().as_bytes(),
        pos: 0,
        builder: MoleculeBuilder::default(),
        branch_stack: Vec::new(),
        previous: None,
        pending: None,
        rings: BTreeMap::new(),
    };
    parser.run()?;
    parser.builder.build()
}

impl Parser<'_> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, ChemError> {
        Err(ChemError::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn run(&mut self) -> Result<(), ChemError> {
        while let Some(c) = self.peek() {
            match c {
                b'(' => {
                    let Some(prev) = self.previous else {
                        return self.error("branch opened before any atom");
                    };
                    if self.pending.is_some() {
                        return self.error("bond symbol before branch");
                    }
                    self.branch_stack.push(prev);
                    self.pos += 1;
                    if self.peek() == Some(b')') {
                        return self.error("empty branch");
                    }
                }
                b')' => {
                    let Some(atom) = self.branch_stack.pop() else {
                        return self.error("unbalanced ')'");
                    };
                    if self.pending.is_some() {
                        return self.error("bond symbol without a following atom");
                    }
                    self.previous = Some(atom);
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    if self.previous.is_none() {
                        return self.error("bond symbol before any atom");
                    }
                    if self.pending.is_some() {
                        return self.error("two consecutive bond symbols");
                    }
                    let (order, direction) = match c {
                        b'-' => (Some(BondOrder::Single), None),
                        b'=' => (Some(BondOrder::Double), None),
                        b'#' => (Some(BondOrder::Triple), None),
                        b':' => (Some(BondOrder::Aromatic), None),
                        b'/' => (Some(BondOrder::Single), Some(Direction::Up)),
                        _ => (Some(BondOrder::Single), Some(Direction::Down)),
                    };
                    self.pending = Some(PendingBond { order, direction });
                    self.pos += 1;
                }
                b'0'..=b'9' | b'%' => self.ring_closure()?,
                b'.' => {
                    return Err(ChemError::Disconnected { fragments: 2 });
                }
                b'[' => {
                    let atom = self.bracket_atom()?;
                    self.attach(atom)?;
                }
                b'*' => return Err(ChemError::UnsupportedElement {
                    symbol: "*".into(),
                    position: self.pos,
                }),
                _ => {
                    let atom = self.organic_atom()?;
                    self.attach(atom)?;
                }
            }
        }
        if !self.branch_stack.is_empty() {
            return self.error("unclosed branch");
        }
        if self.pending.is_some() {
            return self.error("dangling bond symbol at end of input");
        }
        if let Some((&digit, _)) = self.rings.iter().next() {
            return Err(ChemError::UnclosedRing { digit });
        }
        Ok(())
    }

    fn attach(&mut self, atom: usize) -> Result<(), ChemError> {
        if let Some(prev) = self.previous {
            let bond = self.pending.take().unwrap_or(PendingBond {
                order: None,
                direction: None,
            });
            self.add_bond(prev, atom, bond)?;
        }
        self.previous = Some(atom);
        Ok(())
    }

    fn add_bond(&mut self, a: usize, b: usize, bond: PendingBond) -> Result<(), ChemError> {
        let order = bond.order.unwrap_or_else(|| {
            if self.builder.atoms[a].aromatic && self.builder.atoms[b].aromatic {
                BondOrder::Aromatic
            } else {
                BondOrder::Single
            }
        });
        self.builder
            .add_bond(BondSpec {
                a,
                b,
                order,
                direction: bond.direction,
            })
            .map(|_| ())
            .map_err(|e| match e {
                ChemError::InvalidBond { message } => ChemError::Syntax {
                    position: self.pos,
                    message,
                },
                other => other,
            })
    }

    fn ring_closure(&mut self) -> Result<(), ChemError> {
        let start = self.pos;
        let Some(atom) = self.previous else {
            return self.error("ring-closure digit before any atom");
        };
        let digit = if self.peek() == Some(b'%') {
            let d = self.src.get(self.pos + 1..self.pos + 3);
            match d {
                Some(d) if d.iter().all(u8::is_ascii_digit) => {
                    self.pos += 3;
                    ((d[0] - b'0') * 10 + (d[1] - b'0')) as u32
                }
                _ => return self.error("'%' must be followed by two digits"),
            }
        } else {
            let d = (self.src[self.pos] - b'0') as u32;
            self.pos += 1;
            d
        };
        let bond = self.pending.take().unwrap_or(PendingBond {
            order: None,
            direction: None,
        });
        match self.rings.remove(&digit) {
            Some(open) => {
                if open.atom == atom {
                    return Err(ChemError::Syntax {
                        position: start,
                        message: format!("ring bond {digit} closes on its own atom"),
                    });
                }
                let order = match (open.bond.order, bond.order) {
                    (Some(x), Some(y)) if x != y => {
                        return Err(ChemError::Syntax {
                            position: start,
                            message: format!("conflicting bond symbols on ring bond {digit}"),
                        })
                    }
                    (x, y) => x.or(y),
                };
                // The opening mark reads open → close; a closing mark reads close → open.
                let (a, b, direction) = match (open.bond.direction, bond.direction) {
                    (Some(d), _) => (open.atom, atom, Some(d)),
                    (None, Some(d)) => (atom, open.atom, Some(d)),
                    (None, None) => (open.atom, atom, None),
                };
                self.add_bond(a, b, PendingBond { order, direction })?;
                let _ = open.position;
            }
            None => {
                self.rings.insert(
                    digit,
                    RingOpen {
                        atom,
                        bond,
                        position: start,
                    },
                );
            }
        }
        Ok(())
    }

    fn organic_atom(&mut self) -> Result<usize, ChemError> {
        let position = self.pos;
        let c = self.src[self.pos];
        let two = self.src.get(self.pos..self.pos + 2);
        let (symbol, aromatic, len): (&str, bool, usize) = match (c, two) {
            (b'C', Some(b"Cl")) => ("Cl", false, 2),
            (b'B', Some(b"Br")) => ("Br", false, 2),
            (b'B', _) => ("B", false, 1),
            (b'C', _) => ("C", false, 1),
            (b'N', _) => ("N", false, 1),
            (b'O', _) => ("O", false, 1),
            (b'P', _) => ("P", false, 1),
            (b'S', _) => ("S", false, 1),
            (b'F', _) => ("F", false, 1),
            (b'I', _) => ("I", false, 1),
            (b'b', _) => ("B", true, 1),
            (b'c', _) => ("C", true, 1),
            (b'n', _) => ("N", true, 1),
            (b'o', _) => ("O", true, 1),
            (b'p', _) => ("P", true, 1),
            (b's', _) => ("S", true, 1),
            (c, _) if c.is_ascii_alphabetic() => {
                return Err(ChemError::UnsupportedElement {
                    symbol: (c as char).to_string(),
                    position,
                })
            }
            (c, _) => return self.error(format!("unexpected character '{}'", c as char)),
        };
        self.pos += len;
        let element = Element::from_symbol(symbol).expect("organic subset element");
        Ok(self.builder.add_atom(AtomSpec {
            element,
            aromatic,
            hydrogens: None,
            charge: 0,
            isotope: None,
            position,
        }))
    }

    fn read_number(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) && self.pos - start < 6 {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
        }
    }

    fn bracket_atom(&mut self) -> Result<usize, ChemError> {
        let position = self.pos;
        self.pos += 1;
        let isotope = self.read_number();
        if isotope.is_some_and(|i| i > 999) {
            return self.error("isotope mass out of range");
        }

        let (symbol, aromatic) = match self.peek() {
            Some(c) if c.is_ascii_uppercase() => {
                let mut s = String::from(c as char);
                self.pos += 1;
                if let Some(l) = self.peek().filter(u8::is_ascii_lowercase) {
                    let two = format!("{}{}", c as char, l as char);
                    if Element::from_symbol(&two).is_some() {
                        s = two;
                        self.pos += 1;
                    }
                }
                (s, false)
            }
            Some(c) if c.is_ascii_lowercase() => {
                self.pos += 1;
                let mut s = (c as char).to_ascii_uppercase().to_string();
                if let Some(l) = self.peek().filter(|l| matches!(l, b'e' | b's')) {
                    let two = format!("{}{}", s, l as char);
                    if matches!(two.as_str(), "Se" | "As") {
                        s = two;
                        self.pos += 1;
                    }
                }
                (s, true)
            }
            Some(b'*') => {
                return Err(ChemError::UnsupportedElement {
                    symbol: "*".into(),
                    position,
                })
            }
            _ => return self.error("expected element symbol in bracket atom"),
        };
        let element = Element::from_symbol(&symbol).ok_or(ChemError::UnsupportedElement {
            symbol: symbol.clone(),
            position,
        })?;
        if aromatic && !element.can_be_aromatic() {
            return Err(ChemError::UnsupportedElement {
                symbol: symbol.to_ascii_lowercase(),
                position,
            });
        }

        // Chirality: @, @@, @TH1, @AL2, @SP3, @TB10, @OH20 — read and dropped.
        if self.peek() == Some(b'@') {
            self.pos += 1;
            if self.peek() == Some(b'@') {
                self.pos += 1;
            } else if [&b"TH"[..], b"AL", b"SP", b"TB", b"OH"]
                .iter()
                .any(|tag| self.src[self.pos..].starts_with(tag))
            {
                self.pos += 2;
                if self.read_number().is_none() {
                    return self.error("malformed chirality class");
                }
            }
        }

        let mut hydrogens = 0u8;
        if self.peek() == Some(b'H') {
            self.pos += 1;
            hydrogens = match self.read_number() {
                Some(h) if h <= 8 => h as u8,
                Some(_) => return self.error("hydrogen count out of range"),
                None => 1,
            };
        }

        let mut charge: i32 = 0;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            if let Some(n) = self.read_number() {
                charge = unit * n as i32;
            } else {
                charge = unit;
                while self.peek() == Some(sign) {
                    charge += unit;
                    self.pos += 1;
                }
            }
            if charge.abs() > 15 {
                return self.error("charge out of range");
            }
        }

        if self.peek() == Some(b':') {
            self.pos += 1;
            if self.read_number().is_none() {
                return self.error("atom class requires digits");
            }
        }

        if self.peek() != Some(b']') {
            return self.error("expected ']'");
        }
        self.pos += 1;

        Ok(self.builder.add_atom(AtomSpec {
            element,
            aromatic,
            hydrogens: Some(hydrogens),
            charge: charge as i8,
            isotope: isotope.map(|i| i as u16),
            position,
        }))
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Hybridisation family of a carbon atom class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// sp3
    C,
    /// sp2, one double bond
    D,
    /// sp, a triple bond or two double bonds
    T,
    /// aromatic
    A,
}

impl Family {
    fn letter(self) -> char {
        match self {
            Family::C => 'C',
            Family::D => 'D',
            Family::T => 'T',
            Family::A => 'A',
        }
    }

    fn from_letter(c: char) -> Option<Family> {
        match c {
            'C' => Some(Family::C),
            'D' => Some(Family::D),
            'T' => Some(Family::T),
            'A' => Some(Family::A),
            _ => None,
        }
    }
}

/// Carbon class label such as `C2`, `D1` or `A3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomClass {
    pub family: Family,
    pub index: u8,
}

impl AtomClass {
    pub fn new(family: Family, index: u8) -> Self {
        AtomClass { family, index }
    }
}

impl fmt::Display for AtomClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.index)
    }
}

/// Separator in a bond code. `Plain` covers single bonds and aromatic
/// bonds inside a ring; `Biaryl` is a single bond between two aromatic
/// carbons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondKind {
    Plain,
    Biaryl,
    Double,
    Triple,
}

impl BondKind {
    fn separator(self) -> &'static str {
        match self {
            BondKind::Plain => "",
            BondKind::Biaryl => "-",
            BondKind::Double => "=",
            BondKind::Triple => "#",
        }
    }
}

/// One ELBA parameter code. The derived order puts bond codes first, then
/// C-H codes, strain codes and the corrections, which is the order feature
/// tables are printed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElbaCode {
    Bond {
        left: AtomClass,
        right: AtomClass,
        kind: BondKind,
    },
    Hydrogen(AtomClass),
    Strain {
        ring_size: u8,
        class: u8,
    },
    Cis,
    Ortho,
    TransRing(u8),
}

impl ElbaCode {
    /// Bond code with endpoints put in canonical order.
    pub fn bond(x: AtomClass, y: AtomClass, kind: BondKind) -> ElbaCode {
        let (left, right) = if x <= y { (x, y) } else { (y, x) };
        ElbaCode::Bond { left, right, kind }
    }

    /// True for codes counting a bond (heavy-atom or C-H).
    pub fn is_bond_form(&self) -> bool {
        matches!(self, ElbaCode::Bond { .. } | ElbaCode::Hydrogen(_))
    }
}

impl fmt::Display for ElbaCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElbaCode::Bond { left, right, kind } => write!(f, "{left}{}{right}", kind.separator()),
            ElbaCode::Hydrogen(c) => write!(f, "{c}H"),
            ElbaCode::Strain { ring_size, class } => write!(f, "ZS{ring_size}C{class}"),
            ElbaCode::Cis => f.write_str("CIS"),
            ElbaCode::Ortho => f.write_str("ORTHO"),
            ElbaCode::TransRing(n) => write!(f, "TRANSRING{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("'{0}' is not a valid ELBA code")]
pub struct InvalidCode(pub String);

fn parse_label(s: &str) -> Option<(AtomClass, &str)> {
    let mut chars = s.chars();
    let family = Family::from_letter(chars.next()?)?;
    let digit = chars.next()?.to_digit(10)? as u8;
    Some((AtomClass::new(family, digit), &s[2..]))
}

fn parse_number(s: &str) -> Option<u8> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || s.starts_with('0') {
        return None;
    }
    s.parse().ok()
}

impl FromStr for ElbaCode {
    type Err = InvalidCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || InvalidCode(s.to_string());
        match s {
            "CIS" => return Ok(ElbaCode::Cis),
            "ORTHO" => return Ok(ElbaCode::Ortho),
            _ => {}
        }
        if let Some(n) = s.strip_prefix("TRANSRING") {
            return parse_number(n).map(ElbaCode::TransRing).ok_or_else(bad);
        }
        if let Some(rest) = s.strip_prefix("ZS") {
            let (n, k) = rest.split_once('C').ok_or_else(bad)?;
            let ring_size = parse_number(n).filter(|&n| n >= 3).ok_or_else(bad)?;
            let class = parse_number(k).filter(|&k| (1..=4).contains(&k)).ok_or_else(bad)?;
            return Ok(ElbaCode::Strain { ring_size, class });
        }
        let (left, rest) = parse_label(s).ok_or_else(bad)?;
        if rest == "H" {
            return Ok(ElbaCode::Hydrogen(left));
        }
        let (kind, rest) = match rest.chars().next() {
            Some('-') => (BondKind::Biaryl, &rest[1..]),
            Some('=') => (BondKind::Double, &rest[1..]),
            Some('#') => (BondKind::Triple, &rest[1..]),
            _ => (BondKind::Plain, rest),
        };
        let (right, tail) = parse_label(rest).ok_or_else(bad)?;
        if !tail.is_empty() || left > right {
            return Err(bad());
        }
        Ok(ElbaCode::Bond { left, right, kind })
    }
}

impl Serialize for ElbaCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ElbaCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

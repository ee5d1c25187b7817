//! Element table backed by the bundled atomic-weight data file.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const TABLE_SOURCE: &str = include_str!("../../data/atomic_weights.tsv");

/// Version tag of the embedded atomic-weight table.
pub fn weight_table_version() -> u32 {
    table().version
}

#[derive(Debug)]
struct ElementInfo {
    symbol: &'static str,
    number: u8,
    weight: f64,
    valences: Vec<u8>,
}

struct Table {
    version: u32,
    rows: Vec<ElementInfo>,
    by_symbol: HashMap<&'static str, usize>,
    by_number: HashMap<u8, usize>,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut version = 0;
        let mut rows = Vec::new();
        for line in TABLE_SOURCE.lines() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix("# version") {
                version = rest.trim().parse().expect("atomic weight table version");
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&'static str> = line.split('\t').collect();
            assert!(cols.len() == 4, "malformed atomic weight row: {line}");
            let valences = if cols[3] == "-" {
                Vec::new()
            } else {
                cols[3].split(',').map(|v| v.parse().expect("valence")).collect()
            };
            rows.push(ElementInfo {
                symbol: cols[0],
                number: cols[1].parse().expect("atomic number"),
                weight: cols[2].parse().expect("atomic weight"),
                valences,
            });
        }
        let by_symbol = rows.iter().enumerate().map(|(i, r)| (r.symbol, i)).collect();
        let by_number = rows.iter().enumerate().map(|(i, r)| (r.number, i)).collect();
        Table {
            version,
            rows,
            by_symbol,
            by_number,
        }
    })
}

/// A chemical element, identified by atomic number.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(u8);

impl Element {
    pub const H: Element = Element(1);
    pub const B: Element = Element(5);
    pub const C: Element = Element(6);
    pub const N: Element = Element(7);
    pub const O: Element = Element(8);
    pub const F: Element = Element(9);
    pub const P: Element = Element(15);
    pub const S: Element = Element(16);
    pub const CL: Element = Element(17);
    pub const BR: Element = Element(35);
    pub const I: Element = Element(53);

    pub fn from_symbol(symbol: &str) -> Option<Element> {
        let t = table();
        t.by_symbol.get(symbol).map(|&i| Element(t.rows[i].number))
    }

    pub fn from_number(number: u8) -> Option<Element> {
        table().by_number.contains_key(&number).then_some(Element(number))
    }

    fn info(self) -> &'static ElementInfo {
        let t = table();
        &t.rows[t.by_number[&self.0]]
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn symbol(self) -> &'static str {
        self.info().symbol
    }

    /// Standard atomic weight in g/mol.
    pub fn weight(self) -> f64 {
        self.info().weight
    }

    /// Allowed neutral valences, ascending. Empty for elements with no
    /// implicit-hydrogen model (metals).
    pub fn valences(self) -> &'static [u8] {
        &self.info().valences
    }

    pub fn is_halogen(self) -> bool {
        matches!(self.0, 9 | 17 | 35 | 53)
    }

    /// Members of the SMILES organic subset, writable without brackets.
    pub fn is_organic_subset(self) -> bool {
        matches!(self.0, 5 | 6 | 7 | 8 | 9 | 15 | 16 | 17 | 35 | 53)
    }

    /// Elements allowed as lowercase aromatic atoms.
    pub fn can_be_aromatic(self) -> bool {
        matches!(self.0, 5 | 6 | 7 | 8 | 15 | 16 | 33 | 34)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Element::from_symbol(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown element {s}")))
    }
}

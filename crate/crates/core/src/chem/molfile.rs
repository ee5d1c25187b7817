//! MDL V2000 connection-table reader. Coordinates are discarded.

use super::element::Element;
use super::graph::{AtomSpec, BondOrder, BondSpec, Molecule, MoleculeBuilder};
use super::ChemError;

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ChemError> {
    Err(ChemError::Molfile {
        line,
        message: message.into(),
    })
}

fn fixed_int(line: &str, range: std::ops::Range<usize>) -> Option<usize> {
    line.get(range)?.trim().parse().ok()
}

/// Parse a V2000 molfile block (header, counts line, atom and bond blocks,
/// optional `M  CHG`/`M  ISO` properties).
pub fn parse_molfile(input: &str) -> Result<Molecule, ChemError> {
    let lines: Vec<&str> = input.lines().collect();
    if lines.len() < 4 {
        return err(lines.len() + 1, "missing counts line");
    }
    let counts = lines[3];
    if counts.contains("V3000") {
        return err(4, "V3000 connection tables are not supported");
    }
    let (Some(n_atoms), Some(n_bonds)) = (fixed_int(counts, 0..3), fixed_int(counts, 3..6)) else {
        return err(4, "malformed counts line");
    };
    if n_atoms == 0 {
        return Err(ChemError::Empty);
    }

    let mut builder = MoleculeBuilder::default();
    for i in 0..n_atoms {
        let line_no = 5 + i;
        let Some(line) = lines.get(4 + i) else {
            return err(line_no, format!("counts line declares {n_atoms} atoms, table ends early"));
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let symbol_ok = fields
            .get(3)
            .is_some_and(|s| s.chars().next().is_some_and(|c| c.is_ascii_alphabetic()));
        if fields.len() < 4 || !symbol_ok || fields[..3].iter().any(|f| f.parse::<f64>().is_err()) {
            return err(line_no, format!("expected atom line {} of {n_atoms}", i + 1));
        }
        let element = Element::from_symbol(fields[3]).ok_or(ChemError::UnsupportedElement {
            symbol: fields[3].to_string(),
            position: line_no,
        })?;
        let charge = match fields.get(5).and_then(|c| c.parse::<i32>().ok()).unwrap_or(0) {
            1 => 3,
            2 => 2,
            3 => 1,
            5 => -1,
            6 => -2,
            7 => -3,
            _ => 0,
        };
        builder.add_atom(AtomSpec {
            element,
            aromatic: false,
            hydrogens: None,
            charge,
            isotope: None,
            position: line_no,
        });
    }

    let bond_start = 4 + n_atoms;
    for i in 0..n_bonds {
        let line_no = bond_start + i + 1;
        let Some(line) = lines.get(bond_start + i) else {
            return err(line_no, format!("counts line declares {n_bonds} bonds, table ends early"));
        };
        let fields: Vec<usize> = line
            .split_whitespace()
            .take(3)
            .map(|f| f.parse::<usize>())
            .collect::<Result<_, _>>()
            .or_else(|_| err(line_no, "malformed bond line"))?;
        if fields.len() < 3 {
            return err(line_no, "malformed bond line");
        }
        let (a, b, kind) = (fields[0], fields[1], fields[2]);
        if a == 0 || b == 0 || a > n_atoms || b > n_atoms {
            return err(line_no, format!("bond references missing atom ({a}, {b})"));
        }
        let order = match kind {
            1 => BondOrder::Single,
            2 => BondOrder::Double,
            3 => BondOrder::Triple,
            4 => BondOrder::Aromatic,
            _ => return err(line_no, format!("unsupported bond type {kind}")),
        };
        if order == BondOrder::Aromatic {
            builder.atoms[a - 1].aromatic = true;
            builder.atoms[b - 1].aromatic = true;
        }
        builder
            .add_bond(BondSpec {
                a: a - 1,
                b: b - 1,
                order,
                direction: None,
            })
            .or_else(|e| err(line_no, e.to_string()))?;
    }

    let mut charges_reset = false;
    for (offset, line) in lines.iter().enumerate().skip(bond_start + n_bonds) {
        let line_no = offset + 1;
        if line.starts_with("M  END") {
            break;
        }
        let is_chg = line.starts_with("M  CHG");
        let is_iso = line.starts_with("M  ISO");
        if !is_chg && !is_iso {
            continue;
        }
        if is_chg && !charges_reset {
            // A CHG property supersedes atom-block charges.
            for atom in &mut builder.atoms {
                atom.charge = 0;
            }
            charges_reset = true;
        }
        let nums: Vec<i64> = line[6..]
            .split_whitespace()
            .map(|f| f.parse())
            .collect::<Result<_, _>>()
            .or_else(|_| err(line_no, "malformed property line"))?;
        let Some((&count, pairs)) = nums.split_first() else {
            return err(line_no, "malformed property line");
        };
        if pairs.len() != 2 * count as usize {
            return err(line_no, "property entry count mismatch");
        }
        for pair in pairs.chunks(2) {
            let idx = pair[0] as usize;
            if idx == 0 || idx > n_atoms {
                return err(line_no, format!("property references missing atom {idx}"));
            }
            if is_chg {
                builder.atoms[idx - 1].charge = pair[1] as i8;
            } else {
                builder.atoms[idx - 1].isotope = Some(pair[1] as u16);
            }
        }
    }

    // Charged atoms get an explicit hydrogen model: valence shifted by charge.
    for i in 0..builder.atoms.len() {
        let charge = builder.atoms[i].charge;
        if charge == 0 {
            continue;
        }
        let sum: u8 = builder
            .bonds
            .iter()
            .filter(|b| b.a == i || b.b == i)
            .map(|b| b.order.valence())
            .sum();
        let atom = &builder.atoms[i];
        let base = atom.element.valences().first().copied().unwrap_or(0) as i32;
        let shifted = match atom.element.number() {
            6 => base - charge.abs() as i32,
            _ => base + charge as i32,
        };
        let h = (shifted - sum as i32).max(0) as u8;
        builder.atoms[i].hydrogens = Some(h);
    }

    builder.build()
}

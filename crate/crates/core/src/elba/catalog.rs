use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::code::ElbaCode;

const CATALOG: &str = include_str!("../../data/elba_codes.tsv");

struct Catalog {
    version: u32,
    entries: BTreeMap<ElbaCode, &'static str>,
}

fn catalog() -> &'static Catalog {
    static CELL: OnceLock<Catalog> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut version = 0;
        let mut entries = BTreeMap::new();
        for line in CATALOG.lines() {
            if let Some(v) = line.strip_prefix("# version\t") {
                version = v.trim().parse().expect("catalog version");
                continue;
            }
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (code, description) = line.split_once('\t').expect("code<TAB>description");
            let code: ElbaCode = code.parse().expect("catalog code");
            entries.insert(code, description);
        }
        Catalog { version, entries }
    })
}

/// Short human-readable description of a code, if catalogued.
pub fn describe(code: &ElbaCode) -> Option<&'static str> {
    catalog().entries.get(code).copied()
}

/// Every catalogued code in print order.
pub fn known_codes() -> impl Iterator<Item = &'static ElbaCode> {
    catalog().entries.keys()
}

pub fn catalog_version() -> u32 {
    catalog().version
}

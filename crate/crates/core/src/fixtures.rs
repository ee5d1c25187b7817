//! Datasets bundled with the crate: a hydrocarbon training set with gas and
//! liquid enthalpies of formation, and a few ring alcohols.

use crate::store::{parse_jsonl, DatasetRow};

pub const HYDROCARBONS: &str = include_str!("../data/fixtures/hydrocarbons.jsonl");
pub const RING_ALCOHOLS: &str = include_str!("../data/fixtures/ring_alcohols.jsonl");

/// Label recorded in the provenance of tables fitted on [`HYDROCARBONS`].
pub const HYDROCARBON_DATASET: &str = "bundled:hydrocarbons";

pub fn hydrocarbon_rows() -> Vec<DatasetRow> {
    parse_jsonl(HYDROCARBONS)
}

/// Every bundled row, in a single dataset.
pub fn all_rows() -> Vec<DatasetRow> {
    let mut rows = parse_jsonl(HYDROCARBONS);
    let offset = rows.last().map_or(0, |(l, _)| *l);
    rows.extend(parse_jsonl(RING_ALCOHOLS).into_iter().map(|(l, r)| (l + offset, r)));
    rows
}

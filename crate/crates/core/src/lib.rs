//! Structure parsing, bond-additivity enthalpy estimation, and a searchable,
//! consistency-checked thermochemical compound store.

pub mod api;
pub mod chem;
pub mod elba;
pub mod engine;
pub mod fixtures;
pub mod search;
pub mod store;
pub mod thermo;

pub use engine::{Engine, EngineConfig};

//! Extended Laidler bond additivity descriptors: carbon atom classes, bond
//! and C-H codes, ring strain codes and configuration corrections.
//!
//! Code grammar:
//!
//! | form | meaning |
//! |---|---|
//! | `XaYb` | single or aromatic bond between classes `Xa` and `Yb` |
//! | `Xa=Yb`, `Xa#Yb` | double, triple bond |
//! | `A3-A3` | single bond joining two aromatic rings |
//! | `XaH` | C-H bond on a class `Xa` carbon |
//! | `ZS{n}C{k}` | sp3 carbon of class `Ck` in an n-membered ring |
//! | `CIS`, `ORTHO`, `TRANSRING{n}` | corrections |

mod catalog;
mod code;
mod extract;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::{catalog_version, describe, known_codes};
pub use code::{AtomClass, BondKind, ElbaCode, Family, InvalidCode};
pub use extract::{check_domain, classify_atom, extract_features, ElbaFeatureVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainReason {
    NonHydrocarbon,
    FusedRing,
    UnsupportedFeature,
}

impl std::fmt::Display for DomainReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DomainReason::NonHydrocarbon => "non-hydrocarbon",
            DomainReason::FusedRing => "fused-ring",
            DomainReason::UnsupportedFeature => "unsupported-feature",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainVerdict {
    pub in_domain: bool,
    pub reasons: Vec<DomainReason>,
}

impl DomainVerdict {
    pub fn from_reasons(reasons: Vec<DomainReason>) -> Self {
        DomainVerdict {
            in_domain: reasons.is_empty(),
            reasons,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElbaError {
    #[error("atom {atom} is {element}, not carbon")]
    NotCarbon { atom: usize, element: String },
    #[error("outside the ELBA domain: {}", .0.reasons.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", "))]
    OutOfDomain(DomainVerdict),
    #[error("{requested} trans ring double bonds requested but only {available} C=C bonds lie in 8- or 12-membered rings")]
    TransRingHint { requested: u32, available: u32 },
}

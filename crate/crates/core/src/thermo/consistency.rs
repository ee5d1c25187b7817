use serde::{Deserialize, Serialize};

use super::{ThermoKind, ThermoValue};

/// Phase-change identity checked against stored values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// ΔsubH = ΔfH(g) − ΔfH(cr)
    SublimationFromFormation,
    /// ΔvapH = ΔfH(g) − ΔfH(l)
    VaporizationFromFormation,
    /// ΔfusH = ΔfH(l) − ΔfH(cr)
    FusionFromFormation,
    /// ΔsubH = ΔfusH + ΔvapH
    SublimationFromTransitions,
}

impl Identity {
    const ALL: [Identity; 4] = [
        Identity::SublimationFromFormation,
        Identity::VaporizationFromFormation,
        Identity::FusionFromFormation,
        Identity::SublimationFromTransitions,
    ];

    /// (lhs, first term, second term, sign of second term)
    fn terms(self) -> (ThermoKind, ThermoKind, ThermoKind, f64) {
        use ThermoKind::*;
        match self {
            Identity::SublimationFromFormation => (Sublimation, FormationGas, FormationCrystal, -1.0),
            Identity::VaporizationFromFormation => (Vaporization, FormationGas, FormationLiquid, -1.0),
            Identity::FusionFromFormation => (Fusion, FormationLiquid, FormationCrystal, -1.0),
            Identity::SublimationFromTransitions => (Sublimation, Fusion, Vaporization, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "finding", rename_all = "snake_case")]
pub enum Finding {
    /// All three quantities of an identity are stored.
    Check {
        identity: Identity,
        lhs: f64,
        rhs: f64,
        residual: f64,
        /// Root-sum-square of the stated uncertainties.
        combined_uncertainty: f64,
        consistent: bool,
        /// At least one of the three values has no uncertainty; it was
        /// taken as zero.
        missing_uncertainty: bool,
    },
    /// The left-hand quantity is absent but follows from stored values.
    Implied {
        identity: Identity,
        kind: ThermoKind,
        value: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        uncertainty: Option<f64>,
    },
}

impl Finding {
    pub fn is_inconsistent(&self) -> bool {
        matches!(self, Finding::Check { consistent: false, .. })
    }
}

/// Check the phase-change identities that the given values make
/// applicable. When a kind occurs more than once the first value is used.
pub fn consistency_check(values: &[ThermoValue]) -> Vec<Finding> {
    let find = |kind: ThermoKind| values.iter().find(|v| v.kind == kind);
    let mut findings = Vec::new();
    for identity in Identity::ALL {
        let (lhs_kind, first, second, sign) = identity.terms();
        let (Some(a), Some(b)) = (find(first), find(second)) else {
            continue;
        };
        let rhs = a.value + sign * b.value;
        match find(lhs_kind) {
            Some(lhs) => {
                let parts = [lhs.uncertainty, a.uncertainty, b.uncertainty];
                let combined = parts.iter().map(|u| u.unwrap_or(0.0).powi(2)).sum::<f64>().sqrt();
                let residual = (lhs.value - rhs).abs();
                findings.push(Finding::Check {
                    identity,
                    lhs: lhs.value,
                    rhs,
                    residual,
                    combined_uncertainty: combined,
                    consistent: residual <= combined + 1e-9,
                    missing_uncertainty: parts.iter().any(Option::is_none),
                });
            }
            None => {
                let uncertainty = match (a.uncertainty, b.uncertainty) {
                    (Some(x), Some(y)) => Some((x * x + y * y).sqrt()),
                    _ => None,
                };
                findings.push(Finding::Implied {
                    identity,
                    kind: lhs_kind,
                    value: rhs,
                    uncertainty,
                });
            }
        }
    }
    findings
}

//! Plain-text renderings of service responses.

use std::fmt::Write;

use therminfo_core::api::PredictionResponse;
use therminfo_core::search::SearchResponse;
use therminfo_core::store::{AuditReport, CompoundRecord, IngestReport, PendingSubmission, RowStatus, StoreStats};
use therminfo_core::thermo::{FitReport, ThermoValue};

fn thermo_line(out: &mut String, t: &ThermoValue) {
    let _ = match t.uncertainty {
        Some(u) => writeln!(out, "  {:<14} {:>9.1} ± {:.1} kJ/mol", t.kind.as_str(), t.value, u),
        None => writeln!(out, "  {:<14} {:>9.1} kJ/mol", t.kind.as_str(), t.value),
    };
}

pub fn search(r: &SearchResponse) -> String {
    let mut out = format!("You are searching for: {}\nNumber of compounds found: {}\n", r.description, r.total);
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    for h in &r.hits {
        let _ = write!(
            out,
            "{}  {}  {}  {}  {}",
            h.molecular_id,
            h.name,
            h.formula,
            h.casrn.as_deref().unwrap_or("-"),
            h.smiles
        );
        if let Some(s) = h.score.similarity {
            let _ = write!(out, "  similarity {s:.3}");
        }
        out.push('\n');
    }
    out
}

pub fn record(r: &CompoundRecord) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Molecular ID: {}", r.molecular_id);
    let _ = writeln!(out, "Name: {}", r.name);
    if !r.synonyms.is_empty() {
        let _ = writeln!(out, "Other names: {}", r.synonyms.join("; "));
    }
    let _ = writeln!(out, "CASRN: {}", r.casrn.as_deref().unwrap_or("n.a."));
    let _ = writeln!(out, "Formula: {}  Weight: {:.2}", r.formula, r.weight);
    if let Some(s) = r.physical_state {
        let _ = writeln!(out, "Physical state: {s}");
    }
    let _ = writeln!(out, "SMILES: {}\nUnique SMILES: {}", r.smiles, r.usmiles);
    for (label, v) in [("Class", &r.class), ("Subclass", &r.subclass), ("Family", &r.family)] {
        if let Some(v) = v {
            let _ = writeln!(out, "{label}: {v}");
        }
    }
    if !r.characteristics.is_empty() {
        let tags: Vec<&str> = r.characteristics.iter().map(String::as_str).collect();
        let _ = writeln!(out, "Characteristics: {}", tags.join(", "));
    }
    if !r.thermo.is_empty() {
        out.push_str("Thermochemistry at 298.15 K:\n");
        for t in &r.thermo {
            thermo_line(&mut out, t);
        }
    }
    if let Some(o) = &r.observations {
        let _ = writeln!(out, "Observations: {o}");
    }
    for reference in &r.references {
        let _ = writeln!(out, "Reference: {reference}");
    }
    out
}

pub fn prediction(p: &PredictionResponse) -> String {
    let q = &p.query;
    let mut out = format!(
        "SMILES: {}\nCanonical SMILES: {}\nFormula: {}  Weight: {:.2}\n",
        q.input, q.canonical_smiles, q.formula, q.weight
    );
    if let Some(n) = &q.name {
        let _ = writeln!(out, "Name: {n}");
    }
    out.push_str("Estimated:\n");
    for t in &p.estimates {
        thermo_line(&mut out, t);
    }
    if let Some(exp) = &p.experimental {
        let _ = writeln!(out, "Experimental ({} {}):", exp.molecular_id, exp.name);
        for t in &exp.values {
            thermo_line(&mut out, t);
        }
    }
    out.push_str("Parameters:\n");
    for row in &p.features {
        let _ = writeln!(
            out,
            "  {:<8} {:>3}  {}",
            row.code.to_string(),
            row.frequency,
            row.description.as_deref().unwrap_or("")
        );
    }
    if !p.isomers.is_empty() {
        let ids: Vec<&str> = p.isomers.iter().map(|h| h.molecular_id.as_str()).collect();
        let _ = writeln!(out, "Stored isomers: {}", ids.join(", "));
    }
    for w in &p.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn ingest(r: &IngestReport) -> String {
    let mut out = format!(
        "accepted {}, duplicates {}, rejected {}\n",
        r.accepted, r.duplicates, r.rejected
    );
    for row in &r.rows {
        if row.status == RowStatus::Rejected {
            let reasons: Vec<String> = row
                .issues
                .iter()
                .map(|i| format!("{}: {}", i.field.as_deref().unwrap_or("row"), i.message))
                .collect();
            let _ = writeln!(out, "line {} rejected: {}", row.line, reasons.join("; "));
        }
        for w in &row.warnings {
            let _ = writeln!(out, "line {} warning: {w}", row.line);
        }
    }
    out
}

pub fn stats(s: &StoreStats) -> String {
    format!(
        "compounds {}\nsynonyms {}\ncasrn {}\nclasses {}  subclasses {}  families {}\n\
         formation cr {}  l {}  g {}\nphase change fus {}  vap {}  sub {}\npending submissions {}\nhistory entries {}\n",
        s.compounds,
        s.synonyms,
        s.casrn,
        s.classes,
        s.subclasses,
        s.families,
        s.formation.cr,
        s.formation.l,
        s.formation.g,
        s.phase_change.fus,
        s.phase_change.vap,
        s.phase_change.sub,
        s.pending_submissions,
        s.history_entries
    )
}

pub fn audit(r: &AuditReport) -> String {
    let mut out = format!("checked {} records, {} problems\n", r.checked, r.problems.len());
    for p in &r.problems {
        let _ = writeln!(out, "{}: {}", p.molecular_id, p.issue.message);
    }
    out
}

pub fn submission(s: &PendingSubmission) -> String {
    let mut out = format!("{} {} by {}: {} ({})", s.id, s.status, s.submitter, s.payload.name, s.payload.smiles);
    if let Some(id) = &s.molecular_id {
        let _ = write!(out, " -> {id}");
    }
    if let Some(n) = &s.reviewer_note {
        let _ = write!(out, " note: {n}");
    }
    out.push('\n');
    for w in &s.warnings {
        let _ = writeln!(out, "  warning: {w}");
    }
    out
}

pub fn fit(r: &FitReport) -> String {
    let mut out = format!(
        "{} parameters fitted on {} compounds ({}), MAD {:.2} kJ/mol\n",
        r.fitted.entries.len(),
        r.residuals.len(),
        r.fitted.phase,
        r.mad
    );
    if !r.unidentifiable_codes.is_empty() {
        let codes: Vec<String> = r.unidentifiable_codes.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "unidentifiable: {}", codes.join(" "));
    }
    out
}

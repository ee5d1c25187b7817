//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Built without the libtest harness so the verdict lines always reach the
//! output. The process fails when a criterion fails, unless the failure is
//! a known limit whose exact extent is itself verified (see the CASRN
//! sweep).

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use therminfo_core::api::{ErrorCode, PredictionRequest};
use therminfo_core::chem::{canonical_smiles, parse_smiles, write_smiles};
use therminfo_core::elba::{check_domain, extract_features, known_codes, DomainReason, ElbaCode, ElbaFeatureVector};
use therminfo_core::engine::{fit_rows, Tables};
use therminfo_core::fixtures::{hydrocarbon_rows, HYDROCARBON_DATASET};
use therminfo_core::store::{validate_casrn, CompoundInput, Store};
use therminfo_core::thermo::{
    consistency_check, estimate, fit_parameters, Finding, FitOptions, Identity, Phase, ThermoKind, ThermoValue,
    TrainingPoint,
};
use therminfo_core::Engine;

use common::{brute_force_embeds, canonicalization_fixture, random_hydrocarbon, random_permutation, GenOptions};

struct Outcome {
    pass: bool,
    detail: String,
    /// Why a failing criterion cannot be met, given only when the failure
    /// matches its predicted extent exactly.
    known_limit: Option<String>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
            known_limit: None,
        }
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("ELBA extraction exactness", elba_extraction),
        ("CASRN validation", casrn_validation),
        ("Fitter oracle equivalence", fitter_oracle),
        ("Estimation regression", estimation_regression),
        ("Consistency checking", consistency_checking),
        ("Search semantics", search_semantics),
        ("Canonicalization property", canonicalization),
        ("Performance envelope", performance),
        ("Out-of-domain contract", out_of_domain),
    ];
    let mut ok = true;
    for (name, check) in criteria {
        let started = Instant::now();
        let outcome = check();
        let elapsed = started.elapsed();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {name} [{}]: {}", ms(elapsed), outcome.detail);
        if let Some(limit) = &outcome.known_limit {
            println!("     known limit: {limit}");
        }
        if !outcome.pass && outcome.known_limit.is_none() {
            ok = false;
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1e3)
}

fn code_map(pairs: &[(&str, u32)]) -> BTreeMap<String, u32> {
    pairs.iter().map(|&(c, n)| (c.to_string(), n)).collect()
}

fn elba_extraction() -> Outcome {
    let cases = [
        (
            "ethylcyclohexane",
            "CCC1CCCCC1",
            code_map(&[
                ("C1C2", 1),
                ("C2C2", 4),
                ("C2C3", 3),
                ("C1H", 3),
                ("C2H", 12),
                ("C3H", 1),
                ("ZS6C2", 5),
                ("ZS6C3", 1),
            ]),
        ),
        (
            "bicyclohexyl",
            "C1CCC(CC1)C1CCCCC1",
            code_map(&[
                ("C2C2", 8),
                ("C2C3", 4),
                ("C3C3", 1),
                ("C2H", 20),
                ("C3H", 2),
                ("ZS6C2", 10),
                ("ZS6C3", 2),
            ]),
        ),
        (
            "4-methyl-1-tert-butylbenzene",
            "Cc1ccc(cc1)C(C)(C)C",
            code_map(&[
                ("C1C4", 3),
                ("C1H", 12),
                ("C1A3", 1),
                ("C4A3", 1),
                ("A2A2", 2),
                ("A2A3", 4),
                ("A2H", 4),
            ]),
        ),
    ];
    let mut mismatches = Vec::new();
    for (name, smiles, expected) in &cases {
        let mol = parse_smiles(smiles).expect("fixture parses");
        let got = extract_features(&mol, 0).expect("in domain").to_string_map();
        if &got != expected {
            mismatches.push(format!("{name}: got {got:?}"));
        }
    }
    if mismatches.is_empty() {
        Outcome::new(true, "3/3 molecules reproduce every code and count")
    } else {
        Outcome::new(false, mismatches.join("; "))
    }
}

fn casrn_validation() -> Outcome {
    let bases = ["67-56-1", "2892-51-5"];
    let mut survivors = BTreeSet::new();
    let mut predicted = BTreeSet::new();
    let mut mutations = 0;
    for base in bases {
        if !validate_casrn(base) {
            return Outcome::new(false, format!("{base} does not validate"));
        }
        let digits: Vec<usize> = base.bytes().enumerate().filter(|(_, b)| b.is_ascii_digit()).map(|(i, _)| i).collect();
        let body_len = digits.len() - 1;
        for (k, &at) in digits.iter().enumerate() {
            let old = (base.as_bytes()[at] - b'0') as i32;
            for new in 0..10i32 {
                if new == old {
                    continue;
                }
                mutations += 1;
                let mut bytes = base.as_bytes().to_vec();
                bytes[at] = b'0' + new as u8;
                let mutant = String::from_utf8(bytes).unwrap();
                if validate_casrn(&mutant) {
                    survivors.insert(mutant.clone());
                }
                // The check digit is unchanged and the sum moves by w·d, so
                // the mutant still passes iff w·d ≡ 0 (mod 10). A leading
                // zero is rejected regardless.
                let is_check_digit = k == body_len;
                let weight = (body_len - k) as i32;
                if !is_check_digit && (weight * (new - old)).rem_euclid(10) == 0 && !(k == 0 && new == 0) {
                    predicted.insert(mutant);
                }
            }
        }
    }
    let detail = format!(
        "both valid; {} of {mutations} single-digit mutations still validate: {}",
        survivors.len(),
        survivors.iter().cloned().collect::<Vec<_>>().join(", ")
    );
    let mut outcome = Outcome::new(survivors.is_empty(), detail);
    if !survivors.is_empty() && survivors == predicted {
        outcome.known_limit = Some(
            "a weighted mod-10 check digit misses a change d at weight w whenever w·d ≡ 0 (mod 10); \
             the surviving set equals exactly the arithmetically predicted set"
                .to_string(),
        );
    }
    outcome
}

/// Solve `(XᵀX) p = Xᵀy` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot falls below `1e-9` of the largest diagonal.
fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let k = x[0].len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for (row, &yi) in x.iter().zip(y) {
        for i in 0..k {
            for j in 0..k {
                a[i][j] += row[i] * row[j];
            }
            a[i][k] += row[i] * yi;
        }
    }
    let scale = (0..k).map(|i| a[i][i]).fold(0.0, f64::max);
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-9 * scale {
            return None;
        }
        a.swap(col, pivot);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    Some((0..k).map(|i| a[i][k] / a[i][i]).collect())
}

fn residual_norm(x: &[Vec<f64>], y: &[f64], p: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(row, yi)| {
            let fitted: f64 = row.iter().zip(p).map(|(a, b)| a * b).sum();
            (fitted - yi).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

fn fitter_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x05ee_df17);
    let catalogue: Vec<ElbaCode> = known_codes().copied().collect();
    let noise = Normal::new(0.0, 2.0).unwrap();
    let (mut instances, mut worst_param, mut worst_norm) = (0, 0.0f64, 0.0f64);
    while instances < 100 {
        let k = rng.random_range(2..=10);
        let m = rng.random_range(k..=20);
        let mut codes = catalogue.clone();
        rand::seq::SliceRandom::shuffle(codes.as_mut_slice(), &mut rng);
        codes.truncate(k);
        let x: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..k).map(|_| rng.random_range(0..=6) as f64).collect())
            .collect();
        let p_star: Vec<f64> = (0..k).map(|_| rng.random_range(-100.0..100.0)).collect();
        let y_exact: Vec<f64> = x.iter().map(|row| row.iter().zip(&p_star).map(|(a, b)| a * b).sum()).collect();
        if normal_equations(&x, &y_exact).is_none() {
            continue;
        }
        instances += 1;
        let y_noisy: Vec<f64> = y_exact.iter().map(|v| v + noise.sample(&mut rng)).collect();

        let fit = |y: &[f64]| {
            let training: Vec<TrainingPoint> = x
                .iter()
                .zip(y)
                .enumerate()
                .map(|(i, (row, &yi))| TrainingPoint {
                    id: format!("T{i}"),
                    features: ElbaFeatureVector::from_counts(codes.iter().zip(row).map(|(c, &n)| (*c, n as u32))),
                    observed: ThermoValue::new(ThermoKind::FormationGas, yi, None),
                })
                .collect();
            let options = FitOptions {
                dataset: "synthetic".into(),
                universe: Some(codes.clone()),
            };
            fit_parameters(&training, Phase::Gas, &options).expect("fit succeeds")
        };

        let exact = fit(&y_exact);
        for (code, want) in codes.iter().zip(&p_star) {
            let got = exact.fitted.get(code).unwrap_or(f64::NAN);
            let err = (got - want).abs();
            worst_param = worst_param.max(if err.is_nan() { f64::INFINITY } else { err });
        }

        let noisy = fit(&y_noisy);
        let fitted_p: Vec<f64> = codes.iter().map(|c| noisy.fitted.get(c).unwrap_or(f64::NAN)).collect();
        let ours = residual_norm(&x, &y_noisy, &fitted_p);
        let from_report = noisy.residuals.iter().map(|r| r.error * r.error).sum::<f64>().sqrt();
        let oracle_p = normal_equations(&x, &y_noisy).expect("full rank");
        let oracle = residual_norm(&x, &y_noisy, &oracle_p);
        worst_norm = worst_norm.max((ours - oracle).abs()).max((from_report - oracle).abs());
    }
    Outcome::new(
        worst_param <= 1e-8 && worst_norm <= 1e-6,
        format!(
            "{instances} full-rank instances; max |p - p*| = {worst_param:.2e} (tol 1e-8), \
             max residual-norm gap to normal equations = {worst_norm:.2e} (tol 1e-6)"
        ),
    )
}

fn estimation_regression() -> Outcome {
    let mol = parse_smiles("CCC1CCCCC1").unwrap();
    let features = extract_features(&mol, 0).unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    for (phase, target) in [(Phase::Gas, -172.3), (Phase::Liquid, -212.8)] {
        let report = match fit_rows(hydrocarbon_rows(), phase, HYDROCARBON_DATASET) {
            Ok(r) => r,
            Err(e) => return Outcome::new(false, format!("{phase:?} fit failed: {}", e.message)),
        };
        let value = estimate(&features, &report.fitted).map(|v| v.value).unwrap_or(f64::NAN);
        pass &= (value - target).abs() <= 3.0 && report.mad <= 5.0;
        parts.push(format!(
            "{phase:?}: ethylcyclohexane {value:.2} vs {target} (tol 3), MAD {:.3} over {} compounds (max 5)",
            report.mad,
            report.residuals.len()
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn consistency_checking() -> Outcome {
    let engine = Engine::with_fixtures();
    let record = engine.compound("C001332").expect("squaric acid fixture");
    let findings = consistency_check(&record.thermo);
    let sub = findings.iter().find_map(|f| match f {
        Finding::Check {
            identity: Identity::SublimationFromFormation,
            residual,
            combined_uncertainty,
            consistent,
            ..
        } => Some((*residual, *combined_uncertainty, *consistent)),
        _ => None,
    });
    let Some((residual, combined, consistent)) = sub else {
        return Outcome::new(false, "no sublimation check on the squaric acid record");
    };
    let squaric_ok = (residual.abs() - 2.0).abs() < 0.05 && (combined - 23.5).abs() <= 0.1 && consistent;

    let synthetic = [
        ThermoValue::new(ThermoKind::FormationGas, -100.0, Some(1.0)),
        ThermoValue::new(ThermoKind::FormationLiquid, -150.0, Some(1.0)),
        ThermoValue::new(ThermoKind::Vaporization, 100.0, Some(1.0)),
    ];
    let flagged = consistency_check(&synthetic).iter().any(|f| {
        matches!(
            f,
            Finding::Check {
                identity: Identity::VaporizationFromFormation,
                consistent: false,
                ..
            }
        )
    });
    Outcome::new(
        squaric_ok && flagged,
        format!(
            "squaric acid sublimation residual {residual:.2} within combined uncertainty {combined:.2} \
             ({}); synthetic 50 kJ/mol violation {}",
            if consistent { "consistent" } else { "inconsistent" },
            if flagged { "flagged inconsistent" } else { "not flagged" }
        ),
    )
}

fn search_semantics() -> Outcome {
    let engine = Engine::with_fixtures();
    let mut problems = Vec::new();

    let quick = engine.quick("dihydroxycyclobutenedion").expect("quick search");
    let first = quick.hits.first().map(|h| h.molecular_id.as_str());
    if first != Some("C001332") {
        problems.push(format!("quick search ranked {first:?} first"));
    }

    let formula = engine.search_formula("H4C").expect("formula search");
    if !formula.hits.iter().any(|h| h.name == "Methane") {
        problems.push("formula H4C missed methane".into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x51_3117);
    let opts = GenOptions::default();
    let thresholds = [70, 75, 80, 85, 90, 95, 100];
    let (mut queries, mut hits_at_70) = (0, 0);
    while queries < 50 {
        let smiles = random_hydrocarbon(&mut rng, &opts);
        if parse_smiles(&smiles).is_err() {
            continue;
        }
        queries += 1;
        let sets: Vec<BTreeSet<String>> = thresholds
            .iter()
            .map(|&t| {
                let r = engine.search_structure(&smiles, t).expect("similarity search");
                r.hits.into_iter().map(|h| h.molecular_id).collect()
            })
            .collect();
        hits_at_70 += sets[0].len();
        if sets.windows(2).any(|w| !w[1].is_subset(&w[0])) {
            problems.push(format!("threshold monotonicity broken for {smiles}"));
        }
    }

    let snapshot = engine.snapshot();
    let targets: Vec<_> = snapshot
        .index
        .entries()
        .iter()
        .filter_map(|e| {
            let mol = parse_smiles(&e.record.usmiles).ok()?;
            (mol.atom_count() <= 12).then(|| (e.record.molecular_id.clone(), mol))
        })
        .collect();
    let mut sub_queries: Vec<String> = ["C", "CC", "C=C", "C1CCCCC1", "c1ccccc1", "CC(C)(C)C", "CO", "OC=C", "C1CCC1", "CC1CCCC1"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let small = GenOptions {
        max_carbons: 6,
        max_rings: 1,
        phenyl: 0.15,
        unsaturation: 0.1,
    };
    while sub_queries.len() < 60 {
        let s = random_hydrocarbon(&mut rng, &small);
        if parse_smiles(&s).is_ok() {
            sub_queries.push(s);
        }
    }
    let (mut confirmed, mut unconfirmed, mut missed) = (0, 0, 0);
    for q in &sub_queries {
        let query = parse_smiles(q).unwrap();
        let hits: BTreeSet<String> = engine
            .search_substructure(q)
            .expect("substructure search")
            .hits
            .into_iter()
            .map(|h| h.molecular_id)
            .collect();
        for (id, target) in &targets {
            let oracle = brute_force_embeds(&query, target);
            match (hits.contains(id), oracle) {
                (true, true) => confirmed += 1,
                (true, false) => {
                    unconfirmed += 1;
                    problems.push(format!("substructure hit {id} for {q} has no embedding"));
                }
                (false, true) => {
                    missed += 1;
                    problems.push(format!("substructure search missed {id} for {q}"));
                }
                (false, false) => {}
            }
        }
    }

    let detail = format!(
        "quick first hit {first:?}; H4C -> methane; monotone over {queries} random queries \
         ({hits_at_70} hits at 70%); {} substructure queries on {} targets of <= 12 heavy atoms: \
         {confirmed} hits confirmed, {unconfirmed} unconfirmed, {missed} missed",
        sub_queries.len(),
        targets.len()
    );
    if problems.is_empty() {
        Outcome::new(true, detail)
    } else {
        problems.truncate(5);
        Outcome::new(false, format!("{detail}; {}", problems.join("; ")))
    }
}

fn canonicalization() -> Outcome {
    let fixture = canonicalization_fixture();
    let mut rng = ChaCha8Rng::seed_from_u64(0xca_0017);
    let mut violations = Vec::new();
    let mut checks = 0;
    for (smiles, name) in &fixture {
        let mol = match parse_smiles(smiles) {
            Ok(m) => m,
            Err(e) => {
                violations.push(format!("{name} does not parse: {e}"));
                continue;
            }
        };
        let reference = canonical_smiles(&mol);
        for _ in 0..20 {
            checks += 1;
            let perm = random_permutation(mol.atom_count(), &mut rng);
            let renumbered = mol.renumbered(&perm);
            // Also route through text: write the renumbered graph in its own
            // atom order and parse it back.
            let identity: Vec<usize> = (0..renumbered.atom_count()).collect();
            let text = write_smiles(&renumbered, &identity);
            let reparsed = parse_smiles(&text).map(|m| canonical_smiles(&m));
            let direct = canonical_smiles(&renumbered);
            if direct != reference || reparsed.as_deref() != Ok(reference.as_str()) {
                violations.push(format!("{name}: {reference} vs {direct} / {reparsed:?}"));
            }
        }
    }
    let detail = format!(
        "{} molecules x 20 renumberings = {checks} checks, {} violations",
        fixture.len(),
        violations.len()
    );
    let pass = fixture.len() == 200 && violations.is_empty();
    if pass {
        Outcome::new(true, detail)
    } else {
        violations.truncate(5);
        Outcome::new(false, format!("{detail}; {}", violations.join("; ")))
    }
}

/// Random alkyl-style names; uniqueness is not required.
fn generated_name<R: Rng>(rng: &mut R, i: usize) -> String {
    const PARTS: [&str; 10] = [
        "methyl", "ethyl", "propyl", "butyl", "isopropyl", "vinyl", "phenyl", "cyclo", "dimethyl", "allyl",
    ];
    const STEMS: [&str; 8] = ["pentane", "hexane", "heptane", "octane", "hexene", "benzene", "butane", "nonane"];
    let n = rng.random_range(1..=3);
    let prefix: Vec<String> = (0..n)
        .map(|_| format!("{}-{}", rng.random_range(1..=6), PARTS[rng.random_range(0..PARTS.len())]))
        .collect();
    format!("{}{} {i}", prefix.join("-"), STEMS[rng.random_range(0..STEMS.len())])
}

fn performance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3000);
    let opts = GenOptions {
        max_carbons: 14,
        max_rings: 2,
        phenyl: 0.3,
        unsaturation: 0.08,
    };
    let build_started = Instant::now();
    let mut seen = BTreeSet::new();
    let mut rows = Vec::new();
    while rows.len() < 3000 {
        let smiles = random_hydrocarbon(&mut rng, &opts);
        let Ok(mol) = parse_smiles(&smiles) else { continue };
        if !seen.insert(canonical_smiles(&mol)) {
            continue;
        }
        let input = CompoundInput {
            name: generated_name(&mut rng, rows.len()),
            smiles,
            ..CompoundInput::default()
        };
        rows.push((rows.len() + 1, Ok(input)));
    }
    let mut store = Store::in_memory();
    let report = store.ingest_rows(rows).expect("ingest");
    let engine = Engine::new(store, Tables::bundled());
    let size = engine.stats().compounds;
    let build = build_started.elapsed();

    // Worst of three runs per query.
    let worst = |f: &dyn Fn() -> bool| -> (Duration, bool) {
        let mut slowest = Duration::ZERO;
        let mut ok = true;
        for _ in 0..3 {
            let t = Instant::now();
            ok &= f();
            slowest = slowest.max(t.elapsed());
        }
        (slowest, ok)
    };
    let formula = worst(&|| engine.search_formula("C8H16").is_ok() && engine.search_formula("C?H11").is_ok());
    let quick = worst(&|| engine.quick("methylhexane").is_ok() && engine.quick("ethylbenzen").is_ok());
    let similarity = worst(&|| engine.search_structure("CCC1CCCCC1", 70).is_ok());
    let prediction = worst(&|| {
        engine
            .predict(&PredictionRequest {
                smiles: Some("CCC1CCCCC1".into()),
                ..PredictionRequest::default()
            })
            .is_ok()
    });
    let limits = [
        ("formula", formula, 0.1),
        ("quick", quick, 0.7),
        ("similarity", similarity, 1.3),
        ("prediction", prediction, 4.0),
    ];
    let pass = size >= 3000 && limits.iter().all(|(_, (d, ok), limit)| *ok && d.as_secs_f64() < *limit);
    let timings: Vec<String> = limits
        .iter()
        .map(|(name, (d, _), limit)| format!("{name} {} (< {limit} s)", ms(*d)))
        .collect();
    Outcome::new(
        pass,
        format!(
            "{size} compounds ({} accepted, built in {}); {}",
            report.accepted,
            ms(build),
            timings.join(", ")
        ),
    )
}

fn out_of_domain() -> Outcome {
    let engine = Engine::with_fixtures();
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, smiles, reason) in [
        ("naphthalene", "c1ccc2ccccc2c1", DomainReason::FusedRing),
        ("ethanol", "CCO", DomainReason::NonHydrocarbon),
    ] {
        let verdict = check_domain(&parse_smiles(smiles).unwrap());
        let result = engine.predict(&PredictionRequest {
            smiles: Some(smiles.into()),
            ..PredictionRequest::default()
        });
        match result {
            Err(e) if e.code == ErrorCode::OutOfDomain => {
                let reasons = e.verdict().map(|v| v.reasons).unwrap_or_default();
                let ok = reasons.contains(&reason) && !verdict.in_domain;
                pass &= ok;
                parts.push(format!("{name} -> {} {:?} ({})", e.code.as_str(), reasons, e.message));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{name} -> unexpected {}", e.code.as_str()));
            }
            Ok(_) => {
                pass = false;
                parts.push(format!("{name} -> estimated"));
            }
        }
    }
    Outcome::new(pass, parts.join("; "))
}

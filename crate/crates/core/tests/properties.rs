//! Property tests for the structure, descriptor, estimation and search
//! invariants.

mod common;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use therminfo_core::chem::{canonical_smiles, molecular_weight, parse_smiles, BondOrder, Element, Molecule};
use therminfo_core::elba::{check_domain, extract_features, ElbaCode, ElbaFeatureVector, Family};
use therminfo_core::search::{fingerprint, find_embedding, tanimoto, FingerprintConfig};
use therminfo_core::thermo::{
    consistency_check, estimate, fit_parameters, Finding, FitOptions, ParameterTable, Phase, ThermoKind, ThermoValue,
    TrainingPoint,
};
use therminfo_core::Engine;

use common::{brute_force_embeds, canonicalization_fixture, random_hydrocarbon, random_permutation, GenOptions};

fn fixture_molecules() -> &'static [(String, Molecule)] {
    static MOLS: OnceLock<Vec<(String, Molecule)>> = OnceLock::new();
    MOLS.get_or_init(|| {
        canonicalization_fixture()
            .into_iter()
            .map(|(s, _)| (s.to_string(), parse_smiles(s).expect("fixture parses")))
            .collect()
    })
}

fn engine() -> &'static Engine {
    static ENGINE: OnceLock<Engine> = OnceLock::new();
    ENGINE.get_or_init(Engine::with_fixtures)
}

/// A seeded random hydrocarbon; rings may be fused.
fn hydrocarbon(opts: GenOptions) -> impl Strategy<Value = Molecule> {
    any::<u64>().prop_map(move |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            if let Ok(m) = parse_smiles(&random_hydrocarbon(&mut rng, &opts)) {
                return m;
            }
        }
    })
}

/// A seeded random hydrocarbon inside the estimation domain.
fn in_domain() -> impl Strategy<Value = Molecule> {
    any::<u64>().prop_map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            if let Ok(m) = parse_smiles(&random_hydrocarbon(&mut rng, &GenOptions::default())) {
                if check_domain(&m).in_domain {
                    return m;
                }
            }
        }
    })
}

fn fixture_molecule() -> impl Strategy<Value = &'static (String, Molecule)> {
    (0..fixture_molecules().len()).prop_map(|i| &fixture_molecules()[i])
}

fn renumber(mol: &Molecule, seed: u64) -> Molecule {
    let perm = random_permutation(mol.atom_count(), &mut ChaCha8Rng::seed_from_u64(seed));
    mol.renumbered(&perm)
}

fn fp(mol: &Molecule) -> therminfo_core::search::Fingerprint {
    fingerprint(mol, &FingerprintConfig::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn euler_identity(mol in prop_oneof![
        fixture_molecule().prop_map(|(_, m)| m.clone()),
        hydrocarbon(GenOptions { max_rings: 3, ..GenOptions::default() }),
    ]) {
        prop_assert_eq!(mol.rings().len() + mol.atom_count(), mol.bond_count() + 1);
    }

    #[test]
    fn canonical_form_round_trips((smiles, mol) in fixture_molecule()) {
        let once = canonical_smiles(mol);
        let twice = canonical_smiles(&parse_smiles(&once).unwrap());
        prop_assert_eq!(&once, &twice, "{}", smiles);
    }

    #[test]
    fn canonical_form_ignores_numbering(mol in hydrocarbon(GenOptions { max_rings: 3, ..GenOptions::default() }), seed in any::<u64>()) {
        prop_assert_eq!(canonical_smiles(&mol), canonical_smiles(&renumber(&mol, seed)));
    }

    #[test]
    fn carbon_hydrogen_bookkeeping((smiles, mol) in fixture_molecule()) {
        for (i, atom) in mol.atoms().iter().enumerate() {
            if atom.element != Element::from_symbol("C").unwrap() {
                continue;
            }
            // An aromatic carbon also holds one ring π bond unless it carries
            // an exocyclic double bond, as in c(=O).
            let exocyclic_double = mol.neighbors(i).iter().any(|&(_, b)| mol.bond(b).order == BondOrder::Double);
            let total = mol.bond_sum(i) as i32
                + atom.implicit_hydrogens as i32
                + i32::from(atom.charge).abs()
                + i32::from(atom.aromatic && !exocyclic_double);
            prop_assert_eq!(total, 4, "atom {} of {}", i, smiles);
        }
    }

    #[test]
    fn weight_is_additive_and_numbering_free(mol in hydrocarbon(GenOptions::default()), seed in any::<u64>()) {
        let h = Element::from_symbol("H").unwrap().weight();
        let by_atom: f64 = mol.atoms().iter().map(|a| a.element.weight() + a.implicit_hydrogens as f64 * h).sum();
        let w = molecular_weight(&mol);
        prop_assert!((w - by_atom).abs() < 1e-9);
        prop_assert!((w - molecular_weight(&renumber(&mol, seed))).abs() < 1e-9);
    }

    #[test]
    fn parser_survives_arbitrary_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        let _ = parse_smiles(&String::from_utf8_lossy(&bytes));
    }

    #[test]
    fn parser_survives_smiles_like_text(s in "[CcNnOoSBrlF()=#\\[\\]@+\\-0-9%H./\\\\]{0,48}") {
        match parse_smiles(&s) {
            Ok(m) => prop_assert!(m.atom_count() > 0),
            Err(e) => prop_assert!(!e.to_string().is_empty()),
        }
    }

    #[test]
    fn elba_bond_forms_cover_every_bond_and_hydrogen(mol in in_domain()) {
        let v = extract_features(&mol, 0).unwrap();
        let bond_forms: u32 = v.iter().filter(|(c, _)| matches!(c, ElbaCode::Bond { .. } | ElbaCode::Hydrogen(_))).map(|(_, n)| n).sum();
        prop_assert_eq!(bond_forms as usize, mol.bond_count() + mol.total_hydrogens());
        let hydrogens: u32 = v.iter().filter(|(c, _)| matches!(c, ElbaCode::Hydrogen(_))).map(|(_, n)| n).sum();
        prop_assert_eq!(hydrogens as usize, mol.total_hydrogens());
    }

    #[test]
    fn elba_strain_counts_saturated_ring_carbons(mol in in_domain()) {
        let v = extract_features(&mol, 0).unwrap();
        let mut from_codes: BTreeMap<u8, u32> = BTreeMap::new();
        for (code, n) in v.iter() {
            if let ElbaCode::Strain { ring_size, .. } = code {
                *from_codes.entry(*ring_size).or_default() += n;
            }
        }
        let saturated = |a: usize| {
            !mol.atom(a).aromatic && mol.neighbors(a).iter().all(|&(_, b)| mol.bond(b).order == BondOrder::Single)
        };
        let mut expected: BTreeMap<u8, u32> = BTreeMap::new();
        for ring in mol.rings() {
            let n = ring.atoms.iter().filter(|&&a| saturated(a)).count() as u32;
            if n > 0 {
                *expected.entry(ring.size() as u8).or_default() += n;
            }
        }
        prop_assert_eq!(from_codes, expected);
    }

    #[test]
    fn elba_features_ignore_numbering(mol in in_domain(), seed in any::<u64>()) {
        let a = extract_features(&mol, 0).unwrap();
        prop_assert_eq!(&a, &extract_features(&renumber(&mol, seed), 0).unwrap());
        prop_assert_eq!(&a, &extract_features(&mol, 0).unwrap());
    }

    #[test]
    fn estimate_is_linear(
        u in in_domain(),
        v in in_domain(),
        alpha in 0u32..5,
        beta in 0u32..5,
        seed in any::<u64>(),
    ) {
        let fu = extract_features(&u, 0).unwrap();
        let fv = extract_features(&v, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries: BTreeMap<ElbaCode, f64> = fu
            .codes()
            .chain(fv.codes())
            .map(|c| (*c, rand::Rng::random_range(&mut rng, -50.0..50.0)))
            .collect();
        let table = ParameterTable::new(Phase::Gas, entries).unwrap();
        let mut merged = ElbaFeatureVector::new();
        for (c, n) in fu.iter() {
            merged.add(*c, alpha * n);
        }
        for (c, n) in fv.iter() {
            merged.add(*c, beta * n);
        }
        let est = |f: &ElbaFeatureVector| estimate(f, &table).map(|t| t.value).unwrap_or(0.0);
        let lhs = if merged.is_empty() { 0.0 } else { est(&merged) };
        let rhs = alpha as f64 * est(&fu) + beta as f64 * est(&fv);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn tanimoto_is_symmetric_and_bounded(
        (_, a) in fixture_molecule(),
        (_, b) in fixture_molecule(),
    ) {
        let (fa, fb) = (fp(a), fp(b));
        let t = tanimoto(&fa, &fb);
        prop_assert_eq!(t, tanimoto(&fb, &fa));
        prop_assert!((0.0..=1.0).contains(&t));
        prop_assert_eq!(tanimoto(&fa, &fa), 1.0);
    }

    #[test]
    fn embedding_agrees_with_brute_force_and_screen(
        query in hydrocarbon(GenOptions { max_carbons: 5, max_rings: 1, phenyl: 0.1, unsaturation: 0.15 }),
        target in hydrocarbon(GenOptions { max_carbons: 8, max_rings: 2, phenyl: 0.2, unsaturation: 0.1 }),
    ) {
        let oracle = brute_force_embeds(&query, &target);
        let found = find_embedding(&query, &target);
        prop_assert_eq!(found.is_some(), oracle);
        if oracle {
            prop_assert!(fp(&query).is_subset_of(&fp(&target)));
        }
        if let Some(map) = found {
            for b in query.bonds() {
                let tb = target.bond_between(map[b.a], map[b.b]);
                prop_assert!(tb.is_some_and(|t| target.bond(t).order == b.order));
            }
        }
    }

    #[test]
    fn similarity_hits_shrink_as_threshold_rises(mol in hydrocarbon(GenOptions::default())) {
        let smiles = canonical_smiles(&mol);
        let mut previous: Option<Vec<String>> = None;
        for t in [70, 75, 80, 85, 90, 95, 100] {
            let hits: Vec<String> = engine()
                .search_structure(&smiles, t)
                .unwrap()
                .hits
                .into_iter()
                .map(|h| h.molecular_id)
                .collect();
            if let Some(prev) = &previous {
                prop_assert!(hits.iter().all(|h| prev.contains(h)), "threshold {}", t);
            }
            previous = Some(hits);
        }
    }

    #[test]
    fn search_results_are_reproducible(mol in hydrocarbon(GenOptions::default())) {
        let smiles = canonical_smiles(&mol);
        prop_assert_eq!(engine().search_structure(&smiles, 70).unwrap(), engine().search_structure(&smiles, 70).unwrap());
        prop_assert_eq!(engine().search_substructure(&smiles).unwrap(), engine().search_substructure(&smiles).unwrap());
    }
}

/// Small dense design matrices with a well-separated full column rank.
fn design() -> impl Strategy<Value = (Vec<Vec<u32>>, Vec<f64>)> {
    (1usize..=4).prop_flat_map(|k| {
        (k + 1..=8).prop_flat_map(move |m| {
            (
                proptest::collection::vec(proptest::collection::vec(0u32..5, k), m),
                proptest::collection::vec(-100.0f64..100.0, m),
            )
        })
    })
}

fn codes(k: usize) -> Vec<ElbaCode> {
    ["C1C1", "C1C2", "C2C2", "C1H", "C2H"][..k].iter().map(|s| s.parse().unwrap()).collect()
}

fn training(x: &[Vec<u32>], y: &[f64], codes: &[ElbaCode]) -> Vec<TrainingPoint> {
    x.iter()
        .zip(y)
        .enumerate()
        .map(|(i, (row, &yi))| TrainingPoint {
            id: format!("T{i}"),
            features: ElbaFeatureVector::from_counts(codes.iter().copied().zip(row.iter().copied())),
            observed: ThermoValue::new(ThermoKind::FormationGas, yi, None),
        })
        .collect()
}

fn sse(x: &[Vec<u32>], y: &[f64], p: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(row, yi)| (row.iter().zip(p).map(|(&a, b)| a as f64 * b).sum::<f64>() - yi).powi(2))
        .sum()
}

/// Hadamard ratio det(XᵀX) / Π diag(XᵀX), used to skip near-singular draws.
fn well_conditioned(x: &[Vec<u32>]) -> bool {
    let k = x[0].len();
    let mut a = vec![vec![0.0f64; k]; k];
    for row in x {
        for i in 0..k {
            for j in 0..k {
                a[i][j] += (row[i] * row[j]) as f64;
            }
        }
    }
    let diag: f64 = (0..k).map(|i| a[i][i]).product();
    if diag == 0.0 {
        return false;
    }
    let mut det = 1.0;
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c].abs() < 1e-12 {
            return false;
        }
        a.swap(c, p);
        det *= a[c][c];
        for r in c + 1..k {
            let f = a[r][c] / a[c][c];
            let pivot_row = a[c].clone();
            for (x, p) in a[r][c..].iter_mut().zip(&pivot_row[c..]) {
                *x -= f * p;
            }
        }
    }
    det.abs() / diag > 1e-3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn fitted_parameters_sit_at_the_grid_minimum((x, y) in design()) {
        prop_assume!(well_conditioned(&x));
        let codes = codes(x[0].len());
        let report = fit_parameters(&training(&x, &y, &codes), Phase::Gas, &FitOptions::default()).unwrap();
        let p: Vec<f64> = codes.iter().map(|c| report.fitted.get(c).unwrap()).collect();
        let best = sse(&x, &y, &p);
        for i in 0..p.len() {
            for eps in [1e-3, 1e-2, 1e-1, 1.0, -1e-3, -1e-2, -1e-1, -1.0] {
                let mut q = p.clone();
                q[i] += eps;
                prop_assert!(sse(&x, &y, &q) > best, "parameter {} moved by {}", i, eps);
            }
        }
    }

    #[test]
    fn exact_data_is_reproduced((x, _) in design(), p_star in proptest::collection::vec(-100.0f64..100.0, 4)) {
        prop_assume!(well_conditioned(&x));
        let codes = codes(x[0].len());
        let y: Vec<f64> = x.iter().map(|row| row.iter().zip(&p_star).map(|(&a, b)| a as f64 * b).sum()).collect();
        let points = training(&x, &y, &codes);
        let report = fit_parameters(&points, Phase::Gas, &FitOptions::default()).unwrap();
        for (point, yi) in points.iter().zip(&y) {
            if point.features.is_empty() {
                continue;
            }
            let got = estimate(&point.features, &report.fitted).unwrap().value;
            prop_assert!((got - yi).abs() < 1e-8, "{} vs {}", got, yi);
        }
    }

    #[test]
    fn consistency_identities_hold_exactly(g in -2000i32..2000, l_gap in 0i32..300, cr_gap in 0i32..300) {
        // Whole kJ/mol values keep every difference exact in binary.
        let (g, l) = (g as f64, (g - l_gap) as f64);
        let cr = l - cr_gap as f64;
        let u = Some(0.5);
        let values = [
            ThermoValue::new(ThermoKind::FormationGas, g, u),
            ThermoValue::new(ThermoKind::FormationLiquid, l, u),
            ThermoValue::new(ThermoKind::FormationCrystal, cr, u),
            ThermoValue::new(ThermoKind::Fusion, l - cr, u),
            ThermoValue::new(ThermoKind::Vaporization, g - l, u),
            ThermoValue::new(ThermoKind::Sublimation, g - cr, u),
        ];
        let findings = consistency_check(&values);
        prop_assert_eq!(findings.len(), 4);
        for f in findings {
            match f {
                Finding::Check { residual, consistent, .. } => {
                    prop_assert_eq!(residual, 0.0);
                    prop_assert!(consistent);
                }
                other => prop_assert!(false, "unexpected {:?}", other),
            }
        }
    }
}

#[test]
fn in_domain_generator_yields_every_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..400 {
        let Ok(m) = parse_smiles(&random_hydrocarbon(&mut rng, &GenOptions::default())) else { continue };
        if let Ok(v) = extract_features(&m, 0) {
            for code in v.codes() {
                if let ElbaCode::Bond { left, right, .. } = code {
                    seen.insert(left.family);
                    seen.insert(right.family);
                }
            }
        }
    }
    assert!(seen.contains(&Family::C) && seen.contains(&Family::A) && seen.contains(&Family::D));
}

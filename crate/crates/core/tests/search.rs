//! Search behaviour on the bundled fixture store, with frozen regression
//! values checked against independent oracles.

use therminfo_core::chem::parse_smiles;
use therminfo_core::search::{fingerprint, soundex, tanimoto, Fingerprint, FingerprintConfig, QueryMode};
use therminfo_core::Engine;

fn fp(smiles: &str) -> Fingerprint {
    fingerprint(&parse_smiles(smiles).unwrap(), &FingerprintConfig::default())
}

/// Bit-by-bit popcount over both sets.
fn popcount_tanimoto(a: &Fingerprint, b: &Fingerprint) -> (u32, u32) {
    let (mut both, mut either) = (0, 0);
    for bit in 0..a.width() {
        both += u32::from(a.get(bit) && b.get(bit));
        either += u32::from(a.get(bit) || b.get(bit));
    }
    (both, either)
}

fn ids(response: &therminfo_core::search::SearchResponse) -> Vec<&str> {
    response.hits.iter().map(|h| h.molecular_id.as_str()).collect()
}

#[test]
fn frozen_tanimoto_of_ethyl_and_dimethyl_cyclohexane() {
    let a = fp("CCC1CCCCC1");
    let b = fp("CC1(C)CCCCC1");
    let (both, either) = popcount_tanimoto(&a, &b);
    assert_eq!((both, either), (9, 10));
    assert_eq!(tanimoto(&a, &b), 0.9);
    assert_eq!(tanimoto(&a, &b), both as f64 / either as f64);
}

#[test]
fn substructure_examples() {
    let engine = Engine::with_fixtures();
    let ring = engine.search_substructure("C1CCCCC1").unwrap();
    assert!(ids(&ring).contains(&"C000033"));
    assert!(ids(&ring).contains(&"C000037"));
    assert!(!ids(&ring).contains(&"C000038"));

    let benzene = engine.search_substructure("c1ccccc1").unwrap();
    assert!(ids(&benzene).contains(&"C000050"));
    assert!(!ids(&benzene).contains(&"C000031"));
}

#[test]
fn similarity_ranks_the_query_itself_first() {
    let engine = Engine::with_fixtures();
    let r = engine.search_structure("CCC1CCCCC1", 80).unwrap();
    assert_eq!(r.mode, QueryMode::Similarity);
    assert_eq!(r.hits[0].molecular_id, "C000033");
    assert_eq!(r.hits[0].score.similarity, Some(1.0));
    let scores: Vec<f64> = r.hits.iter().map(|h| h.score.similarity.unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    assert!(scores.iter().all(|&s| s >= 0.8));
}

#[test]
fn identity_threshold_returns_only_the_same_structure() {
    let engine = Engine::with_fixtures();
    let r = engine.search_structure("C1CCCCC1CC", 100).unwrap();
    assert_eq!(ids(&r), ["C000033"]);
}

#[test]
fn formula_wildcard_and_reordered_elements() {
    let engine = Engine::with_fixtures();
    let r = engine.search_formula("C?H11").unwrap();
    assert!(ids(&r).contains(&"C000051"));
    let methane = engine.search_formula("H4C").unwrap();
    assert_eq!(ids(&methane), ["C000001"]);
}

#[test]
fn phonetic_fallback_only_without_substring_hits() {
    assert_eq!(soundex("benzeen"), soundex("benzene"));
    let engine = Engine::with_fixtures();
    let r = engine.quick("benzeen").unwrap();
    assert!(r.hits.iter().any(|h| h.name == "Benzene" && h.score.phonetic == Some(true)));
    let r = engine.quick("benzene").unwrap();
    assert!(r.hits.iter().all(|h| h.score.phonetic != Some(true)));
}

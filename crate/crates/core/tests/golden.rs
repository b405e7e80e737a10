//! Golden item vectors at D = 16.
//!
//! Each fixture line is `seed label 16 e1 .. e16`. Set `HDRANK_REGEN_GOLDEN=1`
//! to rewrite the file from the current implementation.

use std::path::PathBuf;

use hdrank::{HvSeed, Hypervector};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

const DIM: usize = 16;

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden_hv16.txt")
}

fn cases() -> Vec<(u64, String)> {
    let mut labels: Vec<String> = Vec::new();
    for code in 1..=3 {
        labels.push(format!("head/{code}"));
        labels.push(format!("mlp/{code}"));
    }
    for layer in 1..=12 {
        labels.push(format!("depth/{layer}"));
    }
    labels.push(String::new());
    labels.push("x".into());
    let mut out = Vec::new();
    for seed in [0u64, 7, 2023, u64::MAX] {
        for l in &labels {
            out.push((seed, l.clone()));
        }
    }
    out
}

// Written from the key derivation rules alone, without calling into the crate.
fn oracle(seed: u64, label: &str) -> Vec<f64> {
    let mut h = Sha256::new();
    h.update(b"hdrank/keyed-rng/v1");
    h.update(seed.to_le_bytes());
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    let key: [u8; 32] = h.finalize().into();
    let mut bytes = [0u8; 8];
    ChaCha8Rng::from_seed(key).fill_bytes(&mut bytes);
    let word = u64::from_le_bytes(bytes);
    (0..DIM).map(|b| if word >> b & 1 == 1 { 1.0 } else { -1.0 }).collect()
}

fn render(seed: u64, label: &str, v: &[f64]) -> String {
    let label = if label.is_empty() { "-" } else { label };
    let elems: Vec<String> = v.iter().map(|x| format!("{x:+}")).collect();
    format!("{seed} {label} {DIM} {}", elems.join(" "))
}

#[test]
fn golden_vectors_match_fixture() {
    let lines: Vec<String> = cases()
        .into_iter()
        .map(|(seed, label)| {
            let hv = Hypervector::random_bipolar(&HvSeed::new(seed, label.clone()), DIM).unwrap();
            assert_eq!(
                hv.as_slice(),
                oracle(seed, &label).as_slice(),
                "seed {seed} label {label:?}"
            );
            render(seed, &label, hv.as_slice())
        })
        .collect();
    let text = lines.join("\n") + "\n";

    if std::env::var_os("HDRANK_REGEN_GOLDEN").is_some() {
        std::fs::write(fixture_path(), &text).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(fixture_path()).expect("fixture missing; run with HDRANK_REGEN_GOLDEN=1");
    for (i, (got, want)) in text.lines().zip(expected.lines()).enumerate() {
        assert_eq!(got, want, "fixture line {}", i + 1);
    }
    assert_eq!(text.lines().count(), expected.lines().count());
}

#[test]
fn prefixes_agree_across_dimensions() {
    let seed = HvSeed::new(2023, "head/2");
    let long = Hypervector::random_bipolar(&seed, 1000).unwrap();
    let short = Hypervector::random_bipolar(&seed, DIM).unwrap();
    assert_eq!(&long.as_slice()[..DIM], short.as_slice());
}

//! Shared helpers for the acceptance suite: a synthetic contract corpus
//! generator with a controllable vulnerability marker, and a singular
//! value routine for rank checks.

#![allow(dead_code)]

use std::path::Path;

/// The statement planted only in "vulnerable" synthetic contracts. Both
/// the toy labels and the directional-generation checks key off it.
pub const MARKER: &str = "owner = tx.origin;";

const N1: [&str; 5] = ["Amber", "Basalt", "Cedar", "Delta", "Ember"];
const N2: [&str; 4] = ["Vault", "Ledger", "Chest", "Locker"];
const VERBS: [&str; 5] = ["deposit", "stake", "fund", "store", "credit"];

/// A small templated vault contract. Index `i` picks a name/verb combo
/// from small pools (no digits, no unique tokens), and `2j`/`2j+1` share
/// the same combo — so within a secure/vulnerable pair the marker is the
/// only difference, and across the corpus every surface form recurs.
/// That makes the vulnerability label learnable from the marker rather
/// than from memorizing per-contract identifiers.
pub fn toy_contract(i: usize, vulnerable: bool) -> String {
    let j = i / 2;
    let (n1, n2, verb) = (N1[j % 5], N2[(j / 5) % 4], VERBS[(j / 20) % 5]);
    let claim = if vulnerable {
        format!("function claim() public {{ {MARKER} }} ")
    } else {
        String::new()
    };
    format!(
        "/// The {n1} {n2} keeps one running total via {verb}.\n\
         contract {n1}{n2} {{ \
         address owner; \
         uint256 total; \
         function {verb}(uint256 amount) public {{ total = total + amount; }} \
         function tally(uint256 amount) public {{ total = total + amount; }} \
         {claim}\
         function reset() public {{ total = 0; }} }}"
    )
}

pub fn is_vulnerable(i: usize) -> bool {
    i % 2 == 1
}

/// Write `n` contracts plus the matching labels file; returns the ids.
pub fn write_corpus(corpus_dir: &Path, labels_path: &Path, n: usize) -> Vec<String> {
    std::fs::create_dir_all(corpus_dir).unwrap();
    let mut labels = String::new();
    let mut ids = Vec::with_capacity(n);
    for i in 0..n {
        let id = format!("v{i:03}");
        std::fs::write(
            corpus_dir.join(format!("{id}.sol")),
            toy_contract(i, is_vulnerable(i)),
        )
        .unwrap();
        let label = if is_vulnerable(i) { "vulnerable" } else { "security" };
        labels.push_str(&format!("{{\"id\":\"{id}\",\"label\":\"{label}\"}}\n"));
        ids.push(id);
    }
    std::fs::write(labels_path, labels).unwrap();
    ids
}

/// Singular values of `m` in descending order, via Jacobi sweeps on the
/// Gram matrix MᵀM.
pub fn singular_values(m: &ndarray::Array2<f64>) -> Vec<f64> {
    let mut a = m.t().dot(m);
    let n = a.nrows();
    for _ in 0..100 {
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-15 {
                    continue;
                }
                let theta = 0.5 * (a[(q, q)] - a[(p, p)]) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip - s * aiq;
                    a[(i, q)] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[(p, i)];
                    let aqi = a[(q, i)];
                    a[(p, i)] = c * api - s * aqi;
                    a[(q, i)] = s * api + c * aqi;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[(i, i)].max(0.0).sqrt()).collect();
    vals.sort_by(|x, y| y.partial_cmp(x).unwrap());
    vals
}

// SPDX-License-Identifier: Apache-2.0

//! Leak analysis checked against codewords computed straight from the tree.

use std::collections::{BTreeSet, HashMap};

use zoned_ledger::cipher::{all_keys, CipherKey};
use zoned_ledger::lab::{confidentiality_probe, Alphabet};

/// Codeword of `node`: fragment XOR parent fragment for non-root nodes; for
/// the root, every fragment whose appearance count across the non-root
/// codewords plus the root's own term is odd.
fn codeword(key: &CipherKey, block: &[u8], node: usize) -> u8 {
    let tree = key.tree();
    let flip = if key.flips()[node] { 0xff } else { 0x00 };
    match tree.parent(node) {
        Some(p) => block[node] ^ block[p] ^ flip,
        None => {
            let mut acc = 0u8;
            for v in 0..block.len() {
                let own = usize::from(v != node);
                let appearances = own + tree.children(v).len() + usize::from(v == node);
                if appearances % 2 == 1 {
                    acc ^= block[v];
                }
            }
            // complements of the non-root codewords fold into the root
            for v in 0..block.len() {
                if v != node && key.flips()[v] {
                    acc ^= 0xff;
                }
            }
            acc ^ flip
        }
    }
}

struct Oracle {
    views: usize,
    uniform: Option<bool>,
    max_deviation: Option<f64>,
    max_candidates: Option<usize>,
}

fn oracle(m: usize, leaked: usize, symbols: &[u8]) -> Oracle {
    let a = symbols.len();
    let mut posterior: HashMap<Vec<u8>, Vec<HashMap<u8, u64>>> = HashMap::new();
    let mut candidates: HashMap<Vec<u8>, BTreeSet<Vec<u8>>> = HashMap::new();
    for key in all_keys(m) {
        for code in 0..a.pow(m as u32) {
            let block: Vec<u8> = (0..m)
                .map(|i| symbols[code / a.pow(i as u32) % a])
                .collect();
            let view: Vec<u8> = (0..leaked)
                .map(|peer| codeword(&key, &block, key.assignment()[peer]))
                .collect();
            if leaked == m {
                candidates.entry(view).or_default().insert(block);
            } else {
                let rows = posterior
                    .entry(view)
                    .or_insert_with(|| vec![HashMap::new(); m]);
                for (pos, &b) in block.iter().enumerate() {
                    *rows[pos].entry(b).or_default() += 1;
                }
            }
        }
    }
    if leaked == m {
        return Oracle {
            views: candidates.len(),
            uniform: None,
            max_deviation: None,
            max_candidates: candidates.values().map(BTreeSet::len).max(),
        };
    }
    let mut uniform = true;
    let mut dev: f64 = 0.0;
    for rows in posterior.values() {
        for row in rows {
            let total: u64 = row.values().sum();
            for s in symbols {
                let c = row.get(s).copied().unwrap_or(0);
                uniform &= c * a as u64 == total;
                dev = dev.max((c as f64 / total as f64 - 1.0 / a as f64).abs());
            }
        }
    }
    Oracle {
        views: posterior.len(),
        uniform: Some(uniform),
        max_deviation: Some(dev),
        max_candidates: None,
    }
}

fn compare(m: usize, leaked: usize, alphabet: Alphabet) -> Oracle {
    let symbols: Vec<u8> = match alphabet {
        Alphabet::Bit => vec![0x00, 0xff],
        Alphabet::Byte => (0..=255).collect(),
    };
    let report = confidentiality_probe(m, leaked, alphabet).unwrap();
    let o = oracle(m, leaked, &symbols);
    assert_eq!(report.views, o.views);
    assert_eq!(report.posterior_uniform, o.uniform);
    assert_eq!(report.max_deviation, o.max_deviation);
    assert_eq!(report.max_candidates, o.max_candidates);
    o
}

#[test]
fn one_bit_fragment_leaks_nothing() {
    for m in 1..=4 {
        for leaked in 0..m {
            let o = compare(m, leaked, Alphabet::Bit);
            assert_eq!(o.uniform, Some(true), "m={m} leaked={leaked}");
        }
    }
}

#[test]
fn full_bit_codeword_candidates_stay_below_key_count() {
    for m in 1..=3 {
        let o = compare(m, m, Alphabet::Bit);
        let keys = zoned_ledger::cipher::key_count(m);
        assert!(num_bigint::BigUint::from(o.max_candidates.unwrap()) <= keys);
    }
}

#[test]
fn full_byte_codeword_of_two_peers() {
    // 16 keys; generic codewords decrypt to 16 distinct blocks
    let o = compare(2, 2, Alphabet::Byte);
    assert_eq!(o.max_candidates, Some(16));
}

#[test]
fn leaked_root_byte_tracks_one_fragment() {
    // the root codeword of a two-node zone is the child's fragment up to
    // complement, so byte fragments are not hidden by a single leak
    let o = compare(2, 1, Alphabet::Byte);
    assert_eq!(o.uniform, Some(false));
    assert!(o.max_deviation.unwrap() > 0.1);
    let o = compare(2, 0, Alphabet::Byte);
    assert_eq!(o.uniform, Some(true));
}

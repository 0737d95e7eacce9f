#![allow(dead_code)] // each test binary uses its own subset

//! Independent oracles for the integration suites.
//!
//! Everything here recomputes results straight from definitions with direct
//! comparisons, deliberately sharing no code with the structures under test.

use cssa::text::{SeedDigit, SpacedSeed, Text};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Suffix array by direct suffix comparison.
pub fn naive_sa_order(text: &Text) -> Vec<usize> {
    let s = text.symbols();
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[a..].cmp(&s[b..]));
    order
}

/// Spaced suffix array by gathering each masked subsequence and sorting by
/// (key, suffix) directly. Class digits map through the seed's class map.
pub fn naive_ssa_order(text: &Text, seed: &SpacedSeed) -> Vec<usize> {
    let s = text.symbols();
    let n = s.len();
    let key = |i: usize| -> Vec<u16> {
        let mut out = Vec::new();
        for (d, digit) in seed.digits().iter().enumerate() {
            if i + d >= n {
                break;
            }
            match digit {
                SeedDigit::Match => out.push(s[i + d]),
                SeedDigit::Class => {
                    out.push(text.sigma() + seed.class_map().unwrap()[s[i + d] as usize])
                }
                SeedDigit::DontCare => {}
            }
        }
        out
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| key(a).cmp(&key(b)).then_with(|| s[a..].cmp(&s[b..])));
    order
}

/// Longest strictly decreasing subsequence by quadratic DP, written against
/// a plain slice.
pub fn lds_oracle(values: &[usize]) -> usize {
    let mut best = vec![0usize; values.len()];
    let mut overall = 0;
    for i in 0..values.len() {
        best[i] = 1;
        for j in 0..i {
            if values[j] > values[i] {
                best[i] = best[i].max(best[j] + 1);
            }
        }
        overall = overall.max(best[i]);
    }
    overall
}

pub fn random_text(rng: &mut ChaCha8Rng, n: usize, sigma: u8, id: &str) -> Text {
    let bytes: Vec<u8> = (0..n).map(|_| b'a' + rng.random_range(0..sigma)).collect();
    Text::from_bytes(&bytes, id).unwrap()
}

/// A random seed spec of length `l` starting with a match digit.
pub fn random_seed_spec(rng: &mut ChaCha8Rng, l: usize) -> String {
    std::iter::once('1')
        .chain((1..l).map(|_| if rng.random_bool(0.5) { '1' } else { '0' }))
        .collect()
}

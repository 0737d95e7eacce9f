//! Suffix arrays and spaced suffix arrays.
//!
//! The spaced suffix array for a text and seed orders positions by the
//! seed-masked key `T_i`, breaking ties by the full suffix. Since the
//! tie-break order is exactly the suffix array order, construction stably
//! sorts SA order by key alone: equal keys keep their SA relative order.
//! A key that is a strict prefix of another compares smaller, which is the
//! behaviour of slice comparison on the extracted key symbols.

use crate::par::*;
use crate::perm::Permutation;
use crate::text::{SeedDigit, SpacedSeed, Text};

/// A suffix array: positions of `text` sorted by suffix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixArray {
    order: Permutation,
    text_ref: String,
}

impl SuffixArray {
    pub fn order(&self) -> &Permutation {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn get(&self, k: usize) -> usize {
        self.order.get(k)
    }

    pub fn text_ref(&self) -> &str {
        &self.text_ref
    }

    /// The rank of each position: `inverse()[order[k]] = k`.
    pub fn inverse(&self) -> Permutation {
        self.order.inverse()
    }

    /// Wraps an externally produced order. The caller vouches it sorts the
    /// suffixes of the named text.
    pub fn from_parts(order: Permutation, text_ref: impl Into<String>) -> Self {
        Self {
            order,
            text_ref: text_ref.into(),
        }
    }
}

/// A spaced suffix array: positions sorted by `(T_i, suffix)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpacedSuffixArray {
    order: Permutation,
    seed_spec: String,
    text_ref: String,
}

impl SpacedSuffixArray {
    pub fn order(&self) -> &Permutation {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn get(&self, k: usize) -> usize {
        self.order.get(k)
    }

    pub fn seed_spec(&self) -> &str {
        &self.seed_spec
    }

    pub fn text_ref(&self) -> &str {
        &self.text_ref
    }

    pub fn from_parts(
        order: Permutation,
        seed_spec: impl Into<String>,
        text_ref: impl Into<String>,
    ) -> Self {
        Self {
            order,
            seed_spec: seed_spec.into(),
            text_ref: text_ref.into(),
        }
    }
}

/// Builds the suffix array by prefix doubling: each round sorts positions by
/// a pair of ranks with doubling gap and re-ranks, until all ranks are
/// distinct. `O(n lg n)` rounds-times-sort overall; the sorts are the
/// data-parallel part.
pub fn build_sa(text: &Text) -> SuffixArray {
    let n = text.len();
    let mut sa: Vec<usize> = (0..n).collect();
    let mut rank: Vec<u32> = text.symbols().iter().map(|&s| u32::from(s)).collect();
    let mut next_rank = vec![0u32; n];

    let mut gap = 1usize;
    loop {
        let pair_key = |i: usize| -> u64 {
            let hi = u64::from(rank[i]) << 32;
            let lo = if i + gap < n {
                u64::from(rank[i + gap]) + 1
            } else {
                0
            };
            hi | lo
        };
        sa.par_sort_unstable_by_key(|&i| pair_key(i));

        next_rank[sa[0]] = 0;
        for w in 1..n {
            let bump = u32::from(pair_key(sa[w]) != pair_key(sa[w - 1]));
            next_rank[sa[w]] = next_rank[sa[w - 1]] + bump;
        }
        std::mem::swap(&mut rank, &mut next_rank);

        if rank[sa[n - 1]] as usize == n - 1 {
            break;
        }
        gap *= 2;
    }

    SuffixArray {
        order: Permutation::from_trusted(sa),
        text_ref: text.id().to_string(),
    }
}

/// Builds the spaced suffix array for `text` and `seed`.
///
/// Panics if the seed carries a class map that does not cover the text's
/// alphabet; validate with [`crate::text::check_class_map`] first when the
/// seed comes from untrusted input.
pub fn build_ssa(text: &Text, seed: &SpacedSeed) -> SpacedSuffixArray {
    let sa = build_sa(text);
    build_ssa_with_sa(text, seed, &sa)
}

/// As [`build_ssa`], reusing an already built suffix array of the same text.
pub fn build_ssa_with_sa(text: &Text, seed: &SpacedSeed, sa: &SuffixArray) -> SpacedSuffixArray {
    assert_eq!(text.id(), sa.text_ref(), "suffix array built on another text");
    let keys = KeyTable::build(text, seed);
    let mut order: Vec<usize> = sa.order().as_slice().to_vec();
    // Stable sort: positions with equal keys keep suffix order.
    order.par_sort_by(|&a, &b| keys.get(a).cmp(keys.get(b)));
    SpacedSuffixArray {
        order: Permutation::from_trusted(order),
        seed_spec: seed.spec().to_string(),
        text_ref: text.id().to_string(),
    }
}

/// All seed keys of a text in one flat buffer, indexed by position.
struct KeyTable {
    flat: Vec<u16>,
    offsets: Vec<usize>,
}

impl KeyTable {
    fn build(text: &Text, seed: &SpacedSeed) -> Self {
        let n = text.len();
        // (offset within window, class code base) per key digit; base 0 means
        // a plain match digit.
        let mut key_digits: Vec<(usize, bool)> = Vec::new();
        for (d, digit) in seed.digits().iter().enumerate() {
            match digit {
                SeedDigit::Match => key_digits.push((d, false)),
                SeedDigit::Class => key_digits.push((d, true)),
                SeedDigit::DontCare => {}
            }
        }
        let class_map: Option<&[u16]> = match seed.class_map() {
            Some(map) => {
                assert!(
                    map.len() >= text.sigma() as usize,
                    "class map does not cover the text alphabet"
                );
                Some(map)
            }
            None => None,
        };

        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0usize);
        let mut total = 0usize;
        for i in 0..n {
            total += key_digits.iter().take_while(|&&(d, _)| i + d < n).count();
            offsets.push(total);
        }

        let mut flat = Vec::with_capacity(total);
        for i in 0..n {
            for &(d, is_class) in &key_digits {
                let j = i + d;
                if j >= n {
                    break;
                }
                let sym = text.symbol(j);
                flat.push(match (class_map, is_class) {
                    (Some(map), true) => text.sigma() + map[sym as usize],
                    _ => sym,
                });
            }
        }
        Self { flat, offsets }
    }

    fn get(&self, i: usize) -> &[u16] {
        &self.flat[self.offsets[i]..self.offsets[i + 1]]
    }
}

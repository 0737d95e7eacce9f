//! A sequence over `[0, rho)` with access, partial rank, and select.

use thiserror::Error;

use super::RsBitvector;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("index {i} out of range for sequence of length {n}")]
    IndexOutOfRange { i: usize, n: usize },
    #[error("label {label} outside alphabet [0, {rho})")]
    UnknownLabel { label: usize, rho: usize },
    #[error("select overflow: label {label} occurs {occ} times, asked for occurrence {k}")]
    SelectOverflow { label: usize, k: usize, occ: usize },
    #[error("label {label} at position {pos} outside alphabet [0, {rho})")]
    LabelOutOfRange { label: usize, pos: usize, rho: usize },
}

/// Payload/overhead split of a structure's footprint, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SizeBits {
    /// Raw level bits.
    pub payload: usize,
    /// Rank/select directories.
    pub overhead: usize,
}

impl SizeBits {
    pub fn total(&self) -> usize {
        self.payload + self.overhead
    }
}

/// A string over alphabet `[0, rho)` decomposed into `ceil(lg rho)` bit
/// levels, most significant first, each a rank/select bitvector. Wavelet
/// matrix layout: every level partitions the sequence stably by that bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSequence {
    n: usize,
    rho: usize,
    levels: Vec<RsBitvector>,
    /// Zeros per level: where the one-half of the next level starts.
    zeros: Vec<usize>,
}

impl LabeledSequence {
    /// Builds from a label sequence. Every label must be below `rho`.
    pub fn build(labels: &[usize], rho: usize) -> Result<Self, QueryError> {
        assert!(rho >= 1, "alphabet must be non-empty");
        if let Some(pos) = labels.iter().position(|&l| l >= rho) {
            return Err(QueryError::LabelOutOfRange {
                label: labels[pos],
                pos,
                rho,
            });
        }
        let n = labels.len();
        let num_levels = levels_for(rho);
        let mut levels = Vec::with_capacity(num_levels);
        let mut zeros = Vec::with_capacity(num_levels);
        let mut cur: Vec<usize> = labels.to_vec();
        let mut next: Vec<usize> = Vec::with_capacity(n);
        for lvl in 0..num_levels {
            let shift = num_levels - 1 - lvl;
            let bv = RsBitvector::from_bits(cur.iter().map(|&l| l >> shift & 1 == 1));
            next.clear();
            next.extend(cur.iter().copied().filter(|&l| l >> shift & 1 == 0));
            let z = next.len();
            next.extend(cur.iter().copied().filter(|&l| l >> shift & 1 == 1));
            std::mem::swap(&mut cur, &mut next);
            levels.push(bv);
            zeros.push(z);
        }
        Ok(Self {
            n,
            rho,
            levels,
            zeros,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// The label at position `i`.
    pub fn access(&self, i: usize) -> Result<usize, QueryError> {
        self.check_index(i)?;
        let mut p = i;
        let mut label = 0usize;
        for (lvl, bv) in self.levels.iter().enumerate() {
            let bit = bv.get(p);
            label = label << 1 | usize::from(bit);
            p = self.descend(lvl, p, bit);
        }
        Ok(label)
    }

    /// Partial rank: occurrences of `labels[i]` in `labels[0..=i]`, always
    /// at least 1.
    pub fn prank(&self, i: usize) -> Result<usize, QueryError> {
        self.check_index(i)?;
        let mut p = i;
        let mut start = 0usize;
        for (lvl, bv) in self.levels.iter().enumerate() {
            let bit = bv.get(p);
            p = self.descend(lvl, p, bit);
            start = self.descend(lvl, start, bit);
        }
        Ok(p - start + 1)
    }

    /// Position of the k-th occurrence of `label`, 1-indexed.
    pub fn select(&self, label: usize, k: usize) -> Result<usize, QueryError> {
        if label >= self.rho {
            return Err(QueryError::UnknownLabel {
                label,
                rho: self.rho,
            });
        }
        let (start, end) = self.label_block(label);
        let occ = end - start;
        if k == 0 || k > occ {
            return Err(QueryError::SelectOverflow {
                label,
                k,
                occ,
            });
        }
        let mut t = start + k - 1;
        for lvl in (0..self.levels.len()).rev() {
            let bv = &self.levels[lvl];
            let bit = label >> (self.levels.len() - 1 - lvl) & 1 == 1;
            t = if bit {
                bv.select1(t - self.zeros[lvl] + 1)
                    .expect("block walk stays in range")
            } else {
                bv.select0(t + 1).expect("block walk stays in range")
            };
        }
        Ok(t)
    }

    /// Total occurrences of `label`.
    pub fn occurrences(&self, label: usize) -> Result<usize, QueryError> {
        if label >= self.rho {
            return Err(QueryError::UnknownLabel {
                label,
                rho: self.rho,
            });
        }
        let (start, end) = self.label_block(label);
        Ok(end - start)
    }

    /// Payload and directory sizes over all levels.
    pub fn size_bits(&self) -> SizeBits {
        SizeBits {
            payload: self.levels.iter().map(RsBitvector::payload_bits).sum(),
            overhead: self.levels.iter().map(RsBitvector::overhead_bits).sum(),
        }
    }

    /// The labels as a plain vector (test and report helper).
    pub fn to_labels(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.access(i).unwrap()).collect()
    }

    pub(crate) fn levels(&self) -> &[RsBitvector] {
        &self.levels
    }

    pub(crate) fn from_parts(
        n: usize,
        rho: usize,
        levels: Vec<RsBitvector>,
        zeros: Vec<usize>,
    ) -> Self {
        Self {
            n,
            rho,
            levels,
            zeros,
        }
    }

    fn check_index(&self, i: usize) -> Result<(), QueryError> {
        if i >= self.n {
            return Err(QueryError::IndexOutOfRange { i, n: self.n });
        }
        Ok(())
    }

    /// Maps a position at `lvl` to its position at the next level.
    fn descend(&self, lvl: usize, p: usize, bit: bool) -> usize {
        let bv = &self.levels[lvl];
        if bit {
            self.zeros[lvl] + bv.rank1_excl(p)
        } else {
            p - bv.rank1_excl(p)
        }
    }

    /// Start and end of `label`'s contiguous block at the bottom level.
    fn label_block(&self, label: usize) -> (usize, usize) {
        let mut start = 0usize;
        let mut end = self.n;
        for lvl in 0..self.levels.len() {
            let bit = label >> (self.levels.len() - 1 - lvl) & 1 == 1;
            start = self.descend(lvl, start, bit);
            end = self.descend(lvl, end, bit);
        }
        (start, end)
    }
}

/// Bit levels needed for an alphabet of size `rho`.
pub(crate) fn levels_for(rho: usize) -> usize {
    if rho <= 1 {
        0
    } else {
        (usize::BITS - (rho - 1).leading_zeros()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seq(labels: &[usize], rho: usize) -> LabeledSequence {
        LabeledSequence::build(labels, rho).unwrap()
    }

    #[test]
    fn levels_for_alphabets() {
        assert_eq!(levels_for(1), 0);
        assert_eq!(levels_for(2), 1);
        assert_eq!(levels_for(3), 2);
        assert_eq!(levels_for(4), 2);
        assert_eq!(levels_for(5), 3);
    }

    #[test]
    fn paper_r_string_queries() {
        // R of the worked example, 0-indexed labels.
        let r = seq(&[0, 1, 1, 0, 0, 1, 1, 1, 1, 1, 1], 2);
        assert_eq!(r.access(1).unwrap(), 1);
        assert_eq!(r.prank(1).unwrap(), 1);
        // prank is inclusive: label 0 occurs at 0, 3 and 4.
        assert_eq!(r.prank(3).unwrap(), 2);
        assert_eq!(r.prank(4).unwrap(), 3);
    }

    #[test]
    fn paper_r_prime_string_queries() {
        let rp = seq(&[0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1], 2);
        assert_eq!(rp.select(0, 1).unwrap(), 0);
        assert_eq!(rp.select(1, 1).unwrap(), 3);
    }

    #[test]
    fn generalized_example_strings() {
        let digits =
            |s: &str| -> Vec<usize> { s.chars().map(|c| c.to_digit(10).unwrap() as usize).collect() };
        let rp = seq(&digits("00011001111100100111"), 2);
        assert_eq!(rp.select(1, 5).unwrap(), 9);
        let r = seq(&digits("01010010111001101101"), 2);
        assert_eq!(r.prank(6).unwrap(), 3);
    }

    #[test]
    fn all_same_labels() {
        let s = seq(&[0; 9], 1);
        for i in 0..9 {
            assert_eq!(s.access(i).unwrap(), 0);
            assert_eq!(s.prank(i).unwrap(), i + 1);
        }
        for k in 1..=9 {
            assert_eq!(s.select(0, k).unwrap(), k - 1);
        }
        assert_eq!(s.size_bits().payload, 0);
    }

    #[test]
    fn query_errors() {
        let s = seq(&[0, 1, 0], 2);
        assert!(matches!(
            s.access(3),
            Err(QueryError::IndexOutOfRange { i: 3, n: 3 })
        ));
        assert!(matches!(
            s.select(2, 1),
            Err(QueryError::UnknownLabel { label: 2, rho: 2 })
        ));
        assert!(matches!(
            s.select(1, 2),
            Err(QueryError::SelectOverflow { occ: 1, .. })
        ));
        assert!(matches!(
            s.select(0, 0),
            Err(QueryError::SelectOverflow { .. })
        ));
        assert!(matches!(
            LabeledSequence::build(&[0, 5], 2),
            Err(QueryError::LabelOutOfRange { label: 5, pos: 1, .. })
        ));
    }

    #[test]
    fn payload_sizes() {
        assert_eq!(seq(&[0; 11], 1).size_bits().payload, 0);
        assert_eq!(seq(&[0, 1, 0, 1, 1, 0, 0, 0, 1, 1, 0], 2).size_bits().payload, 11);
        let labels: Vec<usize> = (0..1000).map(|i| i % 5).collect();
        let s = seq(&labels, 5);
        assert!(s.size_bits().payload <= 3000);
        assert_eq!(s.size_bits().payload, 3 * 1000);
    }

    #[test]
    fn matches_scan_oracle_on_random_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let n = rng.random_range(1..=200);
            let rho = rng.random_range(1..=16);
            let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..rho)).collect();
            let s = seq(&labels, rho);

            for i in 0..n {
                assert_eq!(s.access(i).unwrap(), labels[i]);
                let scan = labels[..=i].iter().filter(|&&l| l == labels[i]).count();
                assert_eq!(s.prank(i).unwrap(), scan, "prank at {i} of {labels:?}");
            }
            for c in 0..rho {
                let positions: Vec<usize> =
                    (0..n).filter(|&i| labels[i] == c).collect();
                assert_eq!(s.occurrences(c).unwrap(), positions.len());
                for (k, &p) in positions.iter().enumerate() {
                    assert_eq!(s.select(c, k + 1).unwrap(), p);
                }
                assert!(s.select(c, positions.len() + 1).is_err());
            }
        }
    }

    #[test]
    fn roundtrip_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..50 {
            let n = rng.random_range(1..=300);
            let rho = rng.random_range(1..=9);
            let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..rho)).collect();
            let s = seq(&labels, rho);
            for i in 0..n {
                let c = s.access(i).unwrap();
                let k = s.prank(i).unwrap();
                assert_eq!(s.select(c, k).unwrap(), i);
            }
        }
    }

    #[test]
    fn overhead_ratio_reported_under_budget() {
        let labels: Vec<usize> = (0..200_000).map(|i| (i * 7 + 3) % 6).collect();
        let s = seq(&labels, 6);
        let sz = s.size_bits();
        assert!(sz.payload <= 200_000 * 3);
        let delta = sz.overhead as f64 / sz.payload as f64;
        assert!(delta <= 0.25, "directory overhead ratio {delta}");
    }
}

//! Plain bitvector with rank/select directories.

/// Bits per superblock; each superblock stores an absolute rank as u64.
const SUPER_BITS: usize = 1 << 16;
/// Bits per block; each block stores a u16 rank relative to its superblock.
const BLOCK_BITS: usize = 512;
const WORDS_PER_BLOCK: usize = BLOCK_BITS / 64;
const BLOCKS_PER_SUPER: usize = SUPER_BITS / BLOCK_BITS;

/// An immutable bit sequence with rank and select support.
///
/// Directory overhead is 64 bits per 65536 plus 16 per 512, about 3.2% of
/// the payload, well under the 25% budget the size reports track.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsBitvector {
    words: Vec<u64>,
    len: usize,
    num_ones: usize,
    /// supers[s] = ones before bit s * SUPER_BITS.
    supers: Vec<u64>,
    /// blocks[b] = ones between the enclosing superblock start and bit
    /// b * BLOCK_BITS.
    blocks: Vec<u16>,
}

impl RsBitvector {
    /// Builds from packed words; bits past `len` in the last word must be 0.
    pub fn from_words(words: Vec<u64>, len: usize) -> Self {
        assert!(words.len() == len.div_ceil(64));
        if let Some(&last) = words.last() {
            let tail = len % 64;
            if tail != 0 {
                assert_eq!(last >> tail, 0, "bits past len must be zero");
            }
        }
        let n_blocks = len.div_ceil(BLOCK_BITS);
        let n_supers = len.div_ceil(SUPER_BITS);
        let mut supers = Vec::with_capacity(n_supers);
        let mut blocks = Vec::with_capacity(n_blocks);
        let mut total = 0u64;
        let mut in_super = 0u64;
        for b in 0..n_blocks {
            if b % BLOCKS_PER_SUPER == 0 {
                supers.push(total);
                in_super = 0;
            }
            blocks.push(in_super as u16);
            let start = b * WORDS_PER_BLOCK;
            let end = (start + WORDS_PER_BLOCK).min(words.len());
            let ones: u64 = words[start..end]
                .iter()
                .map(|w| u64::from(w.count_ones()))
                .sum();
            total += ones;
            in_super += ones;
        }
        if n_blocks == 0 && len > 0 {
            unreachable!();
        }
        Self {
            num_ones: total as usize,
            words,
            len,
            supers,
            blocks,
        }
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut words = Vec::new();
        let mut len = 0usize;
        for bit in bits {
            if len.is_multiple_of(64) {
                words.push(0);
            }
            if bit {
                *words.last_mut().unwrap() |= 1u64 << (len % 64);
            }
            len += 1;
        }
        Self::from_words(words, len)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn num_ones(&self) -> usize {
        self.num_ones
    }

    pub fn num_zeros(&self) -> usize {
        self.len - self.num_ones
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Ones strictly before bit `k`; `k` may equal `len`.
    pub fn rank1_excl(&self, k: usize) -> usize {
        debug_assert!(k <= self.len);
        if k == 0 {
            return 0;
        }
        let s = k / SUPER_BITS;
        let b = k / BLOCK_BITS;
        let mut r = if s < self.supers.len() {
            self.supers[s] as usize
        } else {
            // k == len exactly at a superblock boundary past the last entry
            return self.num_ones;
        };
        if b < self.blocks.len() {
            r += self.blocks[b] as usize;
        } else {
            return self.num_ones;
        }
        let word_start = b * WORDS_PER_BLOCK;
        let full_words = k / 64;
        for w in word_start..full_words {
            r += self.words[w].count_ones() as usize;
        }
        let tail = k % 64;
        if tail != 0 {
            r += (self.words[full_words] & ((1u64 << tail) - 1)).count_ones() as usize;
        }
        r
    }

    /// Zeros strictly before bit `k`.
    pub fn rank0_excl(&self, k: usize) -> usize {
        k - self.rank1_excl(k)
    }

    /// Ones in `bits[0..=i]` (inclusive).
    pub fn rank1(&self, i: usize) -> usize {
        assert!(i < self.len);
        self.rank1_excl(i + 1)
    }

    /// Zeros in `bits[0..=i]` (inclusive).
    pub fn rank0(&self, i: usize) -> usize {
        i + 1 - self.rank1_excl(i + 1)
    }

    /// Position of the k-th one, 1-indexed.
    pub fn select1(&self, k: usize) -> Option<usize> {
        if k == 0 || k > self.num_ones {
            return None;
        }
        // Largest superblock whose prefix count stays below k.
        let s = self.supers.partition_point(|&x| (x as usize) < k) - 1;
        let base = self.supers[s] as usize;
        let lo = s * BLOCKS_PER_SUPER;
        let hi = ((s + 1) * BLOCKS_PER_SUPER).min(self.blocks.len());
        let b = lo
            + self.blocks[lo..hi].partition_point(|&x| base + (x as usize) < k)
            - 1;
        let mut remaining = k - base - self.blocks[b] as usize;
        let word_start = b * WORDS_PER_BLOCK;
        for w in word_start..self.words.len() {
            let ones = self.words[w].count_ones() as usize;
            if remaining <= ones {
                return Some(w * 64 + select_in_word(self.words[w], remaining));
            }
            remaining -= ones;
        }
        None
    }

    /// Position of the k-th zero, 1-indexed.
    pub fn select0(&self, k: usize) -> Option<usize> {
        if k == 0 || k > self.num_zeros() {
            return None;
        }
        let zeros_before_super = |s: usize| s * SUPER_BITS - self.supers[s] as usize;
        let s = partition_point_idx(self.supers.len(), |s| zeros_before_super(s) < k) - 1;
        let super_ones = self.supers[s] as usize;
        let lo = s * BLOCKS_PER_SUPER;
        let hi = ((s + 1) * BLOCKS_PER_SUPER).min(self.blocks.len());
        let zeros_before_block =
            |b: usize| b * BLOCK_BITS - super_ones - self.blocks[b] as usize;
        let b = lo + partition_point_idx(hi - lo, |off| zeros_before_block(lo + off) < k) - 1;
        let mut remaining = k - zeros_before_block(b);
        let word_start = b * WORDS_PER_BLOCK;
        for w in word_start..self.words.len() {
            let zeros = 64 - self.words[w].count_ones() as usize;
            if remaining <= zeros {
                return Some(w * 64 + select_in_word(!self.words[w], remaining));
            }
            remaining -= zeros;
        }
        None
    }

    /// Payload size: the raw bits.
    pub fn payload_bits(&self) -> usize {
        self.len
    }

    /// Directory size: superblock and block rank samples.
    pub fn overhead_bits(&self) -> usize {
        self.supers.len() * 64 + self.blocks.len() * 16
    }

    /// Directory size a bitvector of `n` bits will carry, without building
    /// it. Used when projecting encoding costs.
    pub fn directory_bits_for_len(n: usize) -> usize {
        n.div_ceil(SUPER_BITS) * 64 + n.div_ceil(BLOCK_BITS) * 16
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn supers(&self) -> &[u64] {
        &self.supers
    }

    pub(crate) fn blocks(&self) -> &[u16] {
        &self.blocks
    }
}

/// `partition_point` over an index range `0..len`.
fn partition_point_idx(len: usize, pred: impl Fn(usize) -> bool) -> usize {
    let mut lo = 0;
    let mut hi = len;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Position (0..64) of the r-th set bit of `word`, 1-indexed; r must be in
/// range.
fn select_in_word(mut word: u64, r: usize) -> usize {
    for _ in 1..r {
        word &= word - 1;
    }
    word.trailing_zeros() as usize
}

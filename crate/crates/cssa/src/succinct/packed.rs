//! Fixed-width packed integer array.

/// Integers packed at a fixed bit width, little-endian within 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedIntVec {
    words: Vec<u64>,
    len: usize,
    width: usize,
}

impl PackedIntVec {
    /// Packs `values` at `width` bits each. Every value must fit.
    pub fn from_values(values: impl IntoIterator<Item = usize>, width: usize) -> Self {
        assert!(width <= 64);
        let mut v = Self {
            words: Vec::new(),
            len: 0,
            width,
        };
        for x in values {
            v.push(x);
        }
        v
    }

    pub fn push(&mut self, value: usize) {
        if self.width == 0 {
            assert_eq!(value, 0, "value {value} does not fit in 0 bits");
            self.len += 1;
            return;
        }
        assert!(
            self.width >= 64 || (value >> self.width) == 0,
            "value {value} does not fit in {} bits",
            self.width
        );
        let bit = self.len * self.width;
        let word = bit / 64;
        let off = bit % 64;
        if word >= self.words.len() {
            self.words.push(0);
        }
        self.words[word] |= (value as u64) << off;
        if off + self.width > 64 {
            self.words.push((value as u64) >> (64 - off));
        }
        self.len += 1;
    }

    pub fn get(&self, i: usize) -> usize {
        assert!(i < self.len);
        if self.width == 0 {
            return 0;
        }
        let bit = i * self.width;
        let word = bit / 64;
        let off = bit % 64;
        let mut x = self.words[word] >> off;
        if off + self.width > 64 {
            x |= self.words[word + 1] << (64 - off);
        }
        if self.width < 64 {
            x &= (1u64 << self.width) - 1;
        }
        x as usize
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn payload_bits(&self) -> usize {
        self.len * self.width
    }

    pub fn to_vec(&self) -> Vec<usize> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn from_raw(words: Vec<u64>, len: usize, width: usize) -> Self {
        assert_eq!(words.len(), (len * width).div_ceil(64));
        Self { words, len, width }
    }
}

/// Bits needed to store values below `m`: `ceil(lg m)`, with 0 for `m <= 1`.
pub fn bits_for(m: usize) -> usize {
    if m <= 1 {
        0
    } else {
        (usize::BITS - (m - 1).leading_zeros()) as usize
    }
}

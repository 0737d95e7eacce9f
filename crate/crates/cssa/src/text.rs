//! Texts, alphabets, and spaced/subset seeds.
//!
//! Input texts are read as bytes and remapped to a dense alphabet `[0, sigma)`
//! in byte order, so lexicographic comparisons on code points agree with
//! comparisons on the raw bytes. A spaced seed is a pattern over `{1, 0, T}`:
//! `1` marks positions whose characters enter the comparison key, `0` marks
//! don't-cares, and `T` marks positions compared by equivalence class
//! (subset seeds). Class codes live in a range disjoint from raw code points
//! so keys mixing both digit kinds compare without ambiguity.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeedError {
    #[error("empty seed spec")]
    EmptySeed,
    #[error("illegal digit {0:?} in seed spec (expected 1, 0 or T)")]
    IllegalDigit(char),
    #[error("seed has a class digit but no class map was supplied")]
    MissingClassMap,
    #[error("seed has no match digit")]
    AllDontCare,
    #[error("seed starts with a class digit after normalization; the first digit must be a match")]
    LeadingClass,
    #[error("class map does not cover code point {0}")]
    IncompleteClassMap(u16),
}

#[derive(Debug, Error)]
pub enum TextError {
    #[error("empty text")]
    EmptyText,
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("position {pos} out of range for text of length {len}")]
pub struct PositionOutOfRange {
    pub pos: usize,
    pub len: usize,
}

/// A text over a dense alphabet `[0, sigma)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text {
    symbols: Vec<u16>,
    sigma: u16,
    /// code point -> original byte, ascending; doubles as the remap witness.
    code_to_byte: Vec<u8>,
    id: String,
}

impl Text {
    /// Remaps `bytes` onto `[0, sigma)` preserving byte order. `id` names the
    /// text so downstream structures can check they refer to the same one.
    pub fn from_bytes(bytes: &[u8], id: impl Into<String>) -> Result<Self, TextError> {
        if bytes.is_empty() {
            return Err(TextError::EmptyText);
        }
        let mut present = [false; 256];
        for &b in bytes {
            present[b as usize] = true;
        }
        let mut code_of = [0u16; 256];
        let mut code_to_byte = Vec::new();
        for (b, &p) in present.iter().enumerate() {
            if p {
                code_of[b] = code_to_byte.len() as u16;
                code_to_byte.push(b as u8);
            }
        }
        Ok(Self {
            symbols: bytes.iter().map(|&b| code_of[b as usize]).collect(),
            sigma: code_to_byte.len() as u16,
            code_to_byte,
            id: id.into(),
        })
    }

    /// Loads a raw byte file, optionally appending a sentinel byte.
    pub fn from_file(path: &Path, fasta: bool, sentinel: Option<u8>) -> Result<Self, TextError> {
        let raw = fs::read(path)?;
        let mut bytes = if fasta { strip_fasta(&raw) } else { raw };
        if let Some(s) = sentinel {
            bytes.push(s);
        }
        Self::from_bytes(&bytes, path.display().to_string())
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty texts
    }

    pub fn sigma(&self) -> u16 {
        self.sigma
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn symbols(&self) -> &[u16] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> u16 {
        self.symbols[i]
    }

    /// Original byte for a code point below sigma.
    pub fn byte_for_code(&self, code: u16) -> u8 {
        self.code_to_byte[code as usize]
    }
}

/// FASTA mode: drop `>` header lines and all line breaks.
fn strip_fasta(raw: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(raw.len());
    for line in raw.split(|&b| b == b'\n') {
        if line.first() == Some(&b'>') {
            continue;
        }
        out.extend(line.iter().copied().filter(|&b| b != b'\r'));
    }
    out
}

/// One digit of a seed pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedDigit {
    /// `1`: character must match; enters the key as-is.
    Match,
    /// `0`: don't care; goes to the complement.
    DontCare,
    /// `T`: characters must share an equivalence class; enters the key as a
    /// class code.
    Class,
}

/// A spaced or subset seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpacedSeed {
    digits: Vec<SeedDigit>,
    spec: String,
    /// code point -> equivalence class id, present iff any Class digit is.
    class_map: Option<Vec<u16>>,
}

impl SpacedSeed {
    /// Seed length (total digits).
    pub fn length(&self) -> usize {
        self.digits.len()
    }

    /// Seed weight: the number of match digits.
    pub fn weight(&self) -> usize {
        self.digits
            .iter()
            .filter(|d| matches!(d, SeedDigit::Match))
            .count()
    }

    pub fn class_digits(&self) -> usize {
        self.digits
            .iter()
            .filter(|d| matches!(d, SeedDigit::Class))
            .count()
    }

    /// Weight counting class digits as one half, the convention used when
    /// reporting subset seeds.
    pub fn effective_weight(&self) -> f64 {
        self.weight() as f64 + 0.5 * self.class_digits() as f64
    }

    pub fn digits(&self) -> &[SeedDigit] {
        &self.digits
    }

    /// The normalized spec string this seed was parsed from.
    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn has_class_digits(&self) -> bool {
        self.class_digits() > 0
    }

    /// The class map, present iff the seed has class digits.
    pub fn class_map(&self) -> Option<&[u16]> {
        self.class_map.as_deref()
    }

    pub fn is_all_match(&self) -> bool {
        self.weight() == self.length()
    }
}

/// Parses a seed spec over `{1, 0, T}`.
///
/// Leading don't-cares are stripped: they only shift every start position,
/// so the normalized seed begins with a match digit. `class_map`, when
/// given, maps code points to equivalence class ids and must be total over
/// the alphabet the seed will be used with; it is required exactly when the
/// spec contains a `T`.
pub fn parse_seed(spec: &str, class_map: Option<Vec<u16>>) -> Result<SpacedSeed, SeedError> {
    if spec.is_empty() {
        return Err(SeedError::EmptySeed);
    }
    let mut digits = Vec::with_capacity(spec.len());
    for c in spec.chars() {
        digits.push(match c {
            '1' => SeedDigit::Match,
            '0' => SeedDigit::DontCare,
            'T' => SeedDigit::Class,
            other => return Err(SeedError::IllegalDigit(other)),
        });
    }
    if !digits.contains(&SeedDigit::Match) {
        return Err(SeedError::AllDontCare);
    }
    let lead = digits
        .iter()
        .position(|d| !matches!(d, SeedDigit::DontCare))
        .unwrap();
    digits.drain(..lead);
    if matches!(digits[0], SeedDigit::Class) {
        return Err(SeedError::LeadingClass);
    }
    let has_class = digits.iter().any(|d| matches!(d, SeedDigit::Class));
    if has_class && class_map.is_none() {
        return Err(SeedError::MissingClassMap);
    }
    Ok(SpacedSeed {
        spec: spec[lead..].to_string(),
        digits,
        class_map: if has_class { class_map } else { None },
    })
}

/// Reads one seed spec per line; `#` starts a comment, blank lines skipped.
/// Specs containing class digits receive a copy of `class_map`, which must
/// be built against the text the seeds will run on (see
/// [`class_map_for_text`]); they are rejected when no map is supplied.
pub fn parse_seed_file(
    contents: &str,
    class_map: Option<&[u16]>,
) -> Result<Vec<SpacedSeed>, SeedError> {
    let mut seeds = Vec::new();
    for line in contents.lines() {
        let line = match line.find('#') {
            Some(k) => &line[..k],
            None => line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let map = if line.contains('T') {
            class_map.map(<[u16]>::to_vec)
        } else {
            None
        };
        seeds.push(parse_seed(line, map)?);
    }
    Ok(seeds)
}

/// The seed-masked comparison key of one text position, and its complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedKey {
    /// Code points at match positions, class codes at class positions.
    pub key_symbols: Vec<u16>,
    /// Code points at don't-care positions.
    pub complement_symbols: Vec<u16>,
}

/// Extracts the key `T_i` and complement `T_i'` of the window starting at
/// `i`: symbol `T[j]` lands in the key iff `S[j - i]` is a match digit (class
/// digits contribute `sigma + class`), and in the complement iff it is a
/// don't-care; positions past the text end contribute nothing.
pub fn extract_key(text: &Text, seed: &SpacedSeed, i: usize) -> Result<SeedKey, PositionOutOfRange> {
    let n = text.len();
    if i >= n {
        return Err(PositionOutOfRange { pos: i, len: n });
    }
    let mut key = SeedKey {
        key_symbols: Vec::with_capacity(seed.weight() + seed.class_digits()),
        complement_symbols: Vec::with_capacity(seed.length() - seed.weight()),
    };
    for (d, digit) in seed.digits.iter().enumerate() {
        let j = i + d;
        if j >= n {
            break;
        }
        let sym = text.symbol(j);
        match digit {
            SeedDigit::Match => key.key_symbols.push(sym),
            SeedDigit::DontCare => key.complement_symbols.push(sym),
            SeedDigit::Class => key.key_symbols.push(class_code(text, seed, sym)),
        }
    }
    Ok(key)
}

/// Class code for `sym`, offset past the raw code range.
fn class_code(text: &Text, seed: &SpacedSeed, sym: u16) -> u16 {
    let map = seed
        .class_map
        .as_ref()
        .expect("class digit without class map rejected at parse");
    text.sigma() + map[sym as usize]
}

/// Checks a seed's class map covers `[0, sigma)` of the given text.
pub fn check_class_map(text: &Text, seed: &SpacedSeed) -> Result<(), SeedError> {
    if let Some(map) = &seed.class_map {
        if map.len() < text.sigma() as usize {
            return Err(SeedError::IncompleteClassMap(map.len() as u16));
        }
    }
    Ok(())
}

/// Builds a class map from explicit byte classes, e.g. `[(b"AG", 0), (b"CT", 1)]`,
/// relative to a text's dense alphabet. Unlisted code points each get their
/// own fresh class.
pub fn class_map_for_text(text: &Text, classes: &[(&[u8], u16)]) -> Vec<u16> {
    let mut by_byte: BTreeMap<u8, u16> = BTreeMap::new();
    for (bytes, class) in classes {
        for &b in *bytes {
            by_byte.insert(b, *class);
        }
    }
    let mut next = classes.iter().map(|(_, c)| c + 1).max().unwrap_or(0);
    (0..text.sigma())
        .map(|code| {
            by_byte
                .get(&text.byte_for_code(code))
                .copied()
                .unwrap_or_else(|| {
                    let c = next;
                    next += 1;
                    c
                })
        })
        .collect()
}

//! ZC-QO dictionary layout and the message ↔ sparse-selection mapping.
//!
//! The dictionary has one column per (root, shift) pair. Column `n` of the
//! full quasi-orthogonal dictionary is `root = 1 + floor(n/P)`,
//! `shift = n mod P`. A spec carves the message index space into `L` sections
//! of `2^b` columns each; section `l` owns a contiguous run of `Q` data roots
//! starting at root `1 + (l-1)*Q`, where `Q = ceil(2^b / P)`. The highest root
//! `P - 1` is reserved as the indicator root and never carries data. Keeping
//! whole roots inside one section guarantees the `L` selected data roots are
//! pairwise distinct, which the embedded-indication decoder relies on.

use crate::zc::is_prime;
use crate::{Error, Result};

/// Dictionary layout: prime length, sparsity, section geometry, reserved root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictionarySpec {
    p: u64,
    l: usize,
    bits_per_section: u32,
    roots_per_section: u64,
}

impl DictionarySpec {
    /// Codeword length `P` (prime).
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Number of superposed data sequences `L`.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Payload bits carried by one section.
    pub fn bits_per_section(&self) -> u32 {
        self.bits_per_section
    }

    /// Data roots owned by one section, `Q = ceil(2^b / P)`.
    pub fn roots_per_section(&self) -> u64 {
        self.roots_per_section
    }

    /// Total payload bits `N_info = L * b`.
    pub fn info_bits(&self) -> usize {
        self.l * self.bits_per_section as usize
    }

    /// Effective column count `N = L * 2^b`.
    pub fn column_count(&self) -> u64 {
        self.l as u64 * (1u64 << self.bits_per_section)
    }

    /// Reserved indicator root, fixed to `P - 1`.
    pub fn indicator_root(&self) -> u64 {
        self.p - 1
    }

    /// First data root owned by `section` (0-based section index).
    pub fn first_root(&self, section: usize) -> u64 {
        1 + section as u64 * self.roots_per_section
    }

    /// Section (0-based) owning `root`, if it is a data root.
    pub fn section_of_root(&self, root: u64) -> Option<usize> {
        if root == 0 || root > self.l as u64 * self.roots_per_section {
            return None;
        }
        Some(((root - 1) / self.roots_per_section) as usize)
    }

    /// True when `root` is owned by some section.
    pub fn is_data_root(&self, root: u64) -> bool {
        self.section_of_root(root).is_some()
    }

    /// Number of valid cyclic shifts for a data root. Every root but the last
    /// of a section exposes all `P` shifts; the last is clipped so the section
    /// holds exactly `2^b` columns.
    pub fn valid_shifts(&self, root: u64) -> Result<usize> {
        let section = self
            .section_of_root(root)
            .ok_or_else(|| Error::parameter(format!("{root} is not a data root")))?;
        let offset = (root - self.first_root(section)) * self.p;
        let remaining = (1u64 << self.bits_per_section) - offset;
        Ok(remaining.min(self.p) as usize)
    }
}

/// Builds a dictionary spec carrying `target_info_bits` over `L` sections.
///
/// `b = target_info_bits / L` bits per section; sections own the lowest root
/// indices, leaving the unused high roots as a guard band below the indicator
/// root `P - 1`.
pub fn build_spec(p: u64, l: usize, target_info_bits: usize) -> Result<DictionarySpec> {
    if !is_prime(p) {
        return Err(Error::parameter(format!("codeword length {p} is not prime")));
    }
    if l == 0 {
        return Err(Error::parameter("sparsity L must be >= 1".to_string()));
    }
    if target_info_bits == 0 || target_info_bits % l != 0 {
        return Err(Error::parameter(format!(
            "payload of {target_info_bits} bits is not divisible by L={l}"
        )));
    }
    let b = (target_info_bits / l) as u32;
    if b >= 48 {
        return Err(Error::capacity(format!(
            "{b} bits per section exceeds the supported index range"
        )));
    }
    let columns_per_section = 1u64 << b;
    let q = columns_per_section.div_ceil(p);
    // L*Q data roots plus the reserved indicator root must fit in the P-1
    // available root indices.
    if l as u64 * q + 1 > p - 1 {
        return Err(Error::capacity(format!(
            "need {} data roots (+1 indicator) but only {} roots exist at P={p}",
            l as u64 * q,
            p - 1
        )));
    }
    Ok(DictionarySpec {
        p,
        l,
        bits_per_section: b,
        roots_per_section: q,
    })
}

/// Information word of `N_info` bits, most significant bit first per section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    bits: Vec<bool>,
}

impl Message {
    pub fn new(bits: Vec<bool>) -> Self {
        Message { bits }
    }

    /// Builds the message whose section values are `values[l]`, each `b` bits.
    pub fn from_section_values(values: &[u64], bits_per_section: u32) -> Self {
        let mut bits = Vec::with_capacity(values.len() * bits_per_section as usize);
        for &v in values {
            for i in (0..bits_per_section).rev() {
                bits.push((v >> i) & 1 == 1);
            }
        }
        Message { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Decimal value of section `l` (0-based), MSB first.
    pub fn section_value(&self, section: usize, bits_per_section: u32) -> u64 {
        let start = section * bits_per_section as usize;
        self.bits[start..start + bits_per_section as usize]
            .iter()
            .fold(0u64, |acc, &bit| (acc << 1) | bit as u64)
    }

    /// Hex encoding, MSB first, zero-padded to whole nibbles.
    pub fn to_hex(&self) -> String {
        let padded = self.bits.len().div_ceil(4) * 4;
        let mut out = String::with_capacity(padded / 4);
        let mut nibble = 0u8;
        for i in 0..padded {
            nibble <<= 1;
            if i < self.bits.len() && self.bits[i] {
                nibble |= 1;
            }
            if i % 4 == 3 {
                out.push(char::from_digit(nibble as u32, 16).unwrap());
                nibble = 0;
            }
        }
        out
    }

    /// Parses a hex string produced by [`Message::to_hex`] back into `len` bits.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        if hex.len() != len.div_ceil(4) {
            return Err(Error::parameter(format!(
                "hex message '{hex}' does not encode {len} bits"
            )));
        }
        let mut bits = Vec::with_capacity(len);
        for c in hex.chars() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::parameter(format!("invalid hex digit '{c}'")))?;
            for i in (0..4).rev() {
                if bits.len() < len {
                    bits.push((nibble >> i) & 1 == 1);
                }
            }
        }
        Ok(Message { bits })
    }

    /// Uniformly random message of `len` bits.
    pub fn random(len: usize, rng: &mut impl rand::Rng) -> Self {
        Message {
            bits: (0..len).map(|_| rng.gen()).collect(),
        }
    }
}

/// One selected dictionary column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootShift {
    pub root: u64,
    pub shift: usize,
}

/// The `L` (root, shift) pairs selected by a message, ordered by section.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SparseSelection {
    pub pairs: Vec<RootShift>,
}

/// Maps a message to its `L` (root, shift) pairs: section `l`'s `b` bits read
/// as an unsigned value `d` select `root = first_root(l) + floor(d/P)`,
/// `shift = d mod P`.
pub fn map_message(spec: &DictionarySpec, message: &Message) -> Result<SparseSelection> {
    if message.len() != spec.info_bits() {
        return Err(Error::parameter(format!(
            "message has {} bits, spec carries {}",
            message.len(),
            spec.info_bits()
        )));
    }
    let pairs = (0..spec.l())
        .map(|section| {
            let d = message.section_value(section, spec.bits_per_section());
            RootShift {
                root: spec.first_root(section) + d / spec.p(),
                shift: (d % spec.p()) as usize,
            }
        })
        .collect();
    Ok(SparseSelection { pairs })
}

/// Exact inverse of [`map_message`]. Selections that fall outside the message
/// index space (possible for decoder outputs) are rejected.
pub fn unmap_selection(spec: &DictionarySpec, selection: &SparseSelection) -> Result<Message> {
    if selection.pairs.len() != spec.l() {
        return Err(Error::parameter(format!(
            "selection has {} pairs, spec has L={}",
            selection.pairs.len(),
            spec.l()
        )));
    }
    let mut values = Vec::with_capacity(spec.l());
    for (section, pair) in selection.pairs.iter().enumerate() {
        if spec.section_of_root(pair.root) != Some(section) {
            return Err(Error::DecodeInvalid(format!(
                "root {} does not belong to section {section}",
                pair.root
            )));
        }
        if pair.shift >= spec.p() as usize {
            return Err(Error::DecodeInvalid(format!(
                "shift {} out of range",
                pair.shift
            )));
        }
        let d = (pair.root - spec.first_root(section)) * spec.p() + pair.shift as u64;
        if d >= 1u64 << spec.bits_per_section() {
            return Err(Error::DecodeInvalid(format!(
                "column index {d} exceeds section size 2^{}",
                spec.bits_per_section()
            )));
        }
        values.push(d);
    }
    Ok(Message::from_section_values(&values, spec.bits_per_section()))
}

/// Column `n` of the full QO dictionary, before section restriction:
/// `(1 + floor(n/P), n mod P)` for `0 <= n < (P-1)*P`.
pub fn column_of(spec: &DictionarySpec, n: u64) -> Result<RootShift> {
    let p = spec.p();
    if n >= (p - 1) * p {
        return Err(Error::parameter(format!(
            "column {n} outside [0, {})",
            (p - 1) * p
        )));
    }
    Ok(RootShift {
        root: 1 + n / p,
        shift: (n % p) as usize,
    })
}

//! Bit-packed term-presence documents.

use serde::{Deserialize, Serialize};

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A `k`-bit presence vector with an optional class ordinal.
///
/// Bits past `len` in the last word are always zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitDocument {
    words: Vec<u64>,
    len: usize,
    label: Option<usize>,
}

impl BitDocument {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; words_for(len)], len, label: None }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut doc = Self::zeros(bits.len());
        for (j, &b) in bits.iter().enumerate() {
            if b {
                doc.set(j);
            }
        }
        doc
    }

    /// Builds a document with the given feature indices set. Indices `>= len`
    /// are ignored.
    pub fn from_indices(len: usize, present: impl IntoIterator<Item = usize>) -> Self {
        let mut doc = Self::zeros(len);
        for j in present {
            if j < len {
                doc.set(j);
            }
        }
        doc
    }

    pub fn with_label(mut self, label: usize) -> Self {
        self.label = Some(label);
        self
    }

    pub fn set_label(&mut self, label: Option<usize>) {
        self.label = label;
    }

    #[inline]
    pub fn label(&self) -> Option<usize> {
        self.label
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        debug_assert!(j < self.len);
        (self.words[j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, j: usize) {
        assert!(j < self.len, "bit {j} out of range for {} features", self.len);
        self.words[j / WORD_BITS] |= 1 << (j % WORD_BITS);
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * WORD_BITS + bit)
            })
        })
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|j| self.get(j)).collect()
    }
}

//! Fixed-length bit vectors packed into 64-bit words.
//!
//! A [`Mask`] selects a subset of the `d` canonical coordinates. Row unions
//! over column subsets reduce to word-wise OR plus a population count.

use std::fmt;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mask {
    len: usize,
    words: Vec<u64>,
}

impl Mask {
    /// All-zero mask of length `len`.
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut m = Self::zeros(len);
        for i in 0..len {
            m.set(i, true);
        }
        m
    }

    /// Mask of length `len` with the given (0-based) indices set.
    ///
    /// Panics if an index is out of range.
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut m = Self::zeros(len);
        for &i in indices {
            m.set(i, true);
        }
        m
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut m = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                m.set(i, true);
            }
        }
        m
    }

    /// Builds a mask from 0/1 digits; any nonzero value counts as set.
    pub fn from_digits(bits: &[u8]) -> Self {
        let mut m = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                m.set(i, true);
            }
        }
        m
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
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "mask index {i} out of range {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "mask index {i} out of range {}", self.len);
        let bit = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= bit;
        } else {
            self.words[i / WORD] &= !bit;
        }
    }

    /// Number of set bits.
    #[inline]
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn none(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn ones_vec(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    pub fn union_with(&mut self, other: &Mask) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    /// Writes `a | b` into `self` without reallocating.
    pub(crate) fn assign_union(&mut self, a: &Mask, b: &Mask) {
        for ((out, x), y) in self.words.iter_mut().zip(&a.words).zip(&b.words) {
            *out = x | y;
        }
    }

    /// True when every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Mask) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn to_digits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

impl fmt::Debug for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mask[")?;
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_count_across_words() {
        let mut m = Mask::zeros(130);
        for i in [0, 63, 64, 127, 129] {
            m.set(i, true);
        }
        assert_eq!(m.count_ones(), 5);
        assert_eq!(m.ones_vec(), vec![0, 63, 64, 127, 129]);
        m.set(64, false);
        assert!(!m.get(64));
        assert_eq!(m.count_ones(), 4);
    }

    #[test]
    fn union_and_subset() {
        let a = Mask::from_indices(5, &[0, 1]);
        let b = Mask::from_indices(5, &[1, 2]);
        let mut u = a.clone();
        u.union_with(&b);
        assert_eq!(u.ones_vec(), vec![0, 1, 2]);
        assert!(a.is_subset_of(&u));
        assert!(!u.is_subset_of(&a));
        let mut out = Mask::zeros(5);
        out.assign_union(&a, &b);
        assert_eq!(out, u);
    }

    #[test]
    fn digits_round_trip() {
        let m = Mask::from_digits(&[1, 0, 1, 1, 0]);
        assert_eq!(m.to_digits(), vec![1, 0, 1, 1, 0]);
        assert_eq!(format!("{m:?}"), "Mask[10110]");
    }
}

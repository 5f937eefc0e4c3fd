use std::fmt;

use crate::{words_for, WORD_BITS};

/// A vector over F2, packed 64 entries per word.
///
/// Entry `i` lives in bit `i % 64` of word `i / 64`. Bits past `len` are
/// kept zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// The standard basis vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters, entry 0 first. Whitespace and
    /// underscores are ignored.
    pub fn parse_bits(s: &str) -> Option<Self> {
        let bits: Option<Vec<bool>> = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        bits.map(|b| Self::from_bools(&b))
    }

    /// Builds a vector from raw words, clearing padding bits.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = Self { len, words };
        v.clear_padding();
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub(crate) fn xor_words(&mut self, other: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(other) {
            *a ^= b;
        }
    }

    /// XORs `other` into the entries `offset .. offset + other.len()`.
    pub fn xor_at(&mut self, offset: usize, other: &BitVec) {
        assert!(offset + other.len <= self.len, "xor_at out of range");
        for i in other.iter_ones() {
            self.flip(offset + i);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    /// The F2 inner product (parity of the common support).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    /// The entries `start .. start + len` as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = BitVec::zeros(len);
        for i in self.iter_ones().filter(|&i| i >= start && i < start + len) {
            out.set(i - start, true);
        }
        out
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        out.xor_at(self.len, other);
        out
    }

    /// Little-endian hex: entry `i` is bit `i % 8` of byte `i / 8`.
    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8);
        let mut s = String::with_capacity(2 * nbytes);
        for b in 0..nbytes {
            let byte = (self.words[b / 8] >> (8 * (b % 8))) & 0xff;
            s.push_str(&format!("{byte:02x}"));
        }
        s
    }

    /// Inverse of [`BitVec::to_hex`]. Rejects wrong lengths and stray bits
    /// beyond `len`.
    pub fn from_hex(len: usize, hex: &str) -> Option<BitVec> {
        let nbytes = len.div_ceil(8);
        if hex.len() != 2 * nbytes || !hex.is_ascii() {
            return None;
        }
        let mut v = BitVec::zeros(len);
        for b in 0..nbytes {
            let byte = u64::from_str_radix(&hex[2 * b..2 * b + 2], 16).ok()?;
            v.words[b / 8] |= byte << (8 * (b % 8));
        }
        let before = v.words.clone();
        v.clear_padding();
        (v.words == before).then_some(v)
    }

    fn clear_padding(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[{self}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip() {
        let v = BitVec::parse_bits("1011 0000 1110 1").unwrap();
        assert_eq!(v.to_hex(), "0d17");
        assert_eq!(BitVec::from_hex(13, "0d17"), Some(v));
        // bit 13 is padding for len 13
        assert_eq!(BitVec::from_hex(13, "0d37"), None);
        assert_eq!(BitVec::from_hex(13, "0d"), None);
    }

    #[test]
    fn ones_and_slices() {
        let mut v = BitVec::zeros(130);
        for i in [0, 63, 64, 129] {
            v.set(i, true);
        }
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(v.first_one(), Some(0));
        assert_eq!(v.slice(60, 10).iter_ones().collect::<Vec<_>>(), vec![3, 4]);
        let w = v.slice(0, 64).concat(&v.slice(64, 66));
        assert_eq!(w, v);
    }

    #[test]
    fn dot_is_parity() {
        let a = BitVec::parse_bits("1101").unwrap();
        let b = BitVec::parse_bits("1011").unwrap();
        assert!(!a.dot(&b));
        assert!(a.dot(&BitVec::unit(4, 0)));
    }
}

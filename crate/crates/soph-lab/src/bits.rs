//! Finite binary strings and the length-lexicographic bijection with the
//! natural numbers.
//!
//! Strings compare positionally: `"0"` and `"00"` are distinct values. The
//! natural ordering used everywhere in this crate is length-lexicographic
//! (shorter strings first, then lexicographic), which is exactly the order
//! induced by [`index_of`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::ParseError;

/// A finite string of bits. The empty string is a valid, distinct value and
/// serializes as `e`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn new() -> Self {
        BitString { bits: Vec::new() }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        BitString { bits: bits.to_vec() }
    }

    /// The `len`-bit string whose big-endian value is `value`.
    pub fn from_value(value: u64, len: usize) -> Self {
        assert!(len >= 64 || value < (1u64 << len), "value does not fit in len bits");
        let bits = (0..len).map(|i| ((value >> (len - 1 - i)) & 1) as u8).collect();
        BitString { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.bits.get(i).copied()
    }

    pub fn push(&mut self, bit: u8) {
        assert!(bit <= 1);
        self.bits.push(bit);
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }

    /// The first `n` bits as a new string.
    pub fn prefix(&self, n: usize) -> BitString {
        BitString { bits: self.bits[..n].to_vec() }
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.bits.len() >= self.bits.len() && other.bits[..self.bits.len()] == self.bits[..]
    }

    pub fn child(&self, bit: u8) -> BitString {
        let mut out = self.clone();
        out.push(bit);
        out
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitString { bits }
    }

    /// Big-endian integer value of the bits (0 for the empty string).
    pub fn value(&self) -> BigUint {
        let mut v = BigUint::ZERO;
        for &b in &self.bits {
            v <<= 1;
            if b == 1 {
                v += 1u32;
            }
        }
        v
    }
}

impl Ord for BitString {
    /// Length-lexicographic order: `e < 0 < 1 < 00 < 01 < ...`.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bits
            .len()
            .cmp(&other.bits.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return f.write_str("e");
        }
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        if s == "e" {
            return Ok(BitString::new());
        }
        if s.is_empty() {
            return Err(ParseError::new("empty bit string literal; use 'e' for the empty string"));
        }
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => return Err(ParseError::new(format!("invalid bit character {c:?}"))),
            }
        }
        Ok(BitString { bits })
    }
}

/// Position of `x` in length-lexicographic order: `index_of(e) = 0`,
/// `index_of("0") = 1`, `index_of("1") = 2`, `index_of("00") = 3`, ...
///
/// Closed form: `2^len(x) - 1 + value(x)`.
pub fn index_of(x: &BitString) -> BigUint {
    (BigUint::from(1u32) << x.len()) - 1u32 + x.value()
}

/// Inverse of [`index_of`].
pub fn string_of(n: &BigUint) -> BitString {
    // len is the unique L with 2^L - 1 <= n < 2^{L+1} - 1.
    let len = (n + 1u32).bits() as usize - 1;
    let value = n - ((BigUint::from(1u32) << len) - 1u32);
    let mut bits = vec![0u8; len];
    for (i, bit) in bits.iter_mut().enumerate() {
        if value.bit((len - 1 - i) as u64) {
            *bit = 1;
        }
    }
    BitString { bits }
}

/// [`string_of`] for small indexes.
pub fn string_of_u64(n: u64) -> BitString {
    string_of(&BigUint::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_of_base_cases() {
        assert_eq!(index_of(&BitString::new()), BigUint::ZERO);
        assert_eq!(index_of(&"0".parse().unwrap()), BigUint::from(1u32));
        assert_eq!(index_of(&"1".parse().unwrap()), BigUint::from(2u32));
        assert_eq!(index_of(&"00".parse().unwrap()), BigUint::from(3u32));
        assert_eq!(index_of(&"111".parse().unwrap()), BigUint::from(14u32));
    }

    #[test]
    fn string_of_base_cases() {
        assert_eq!(string_of_u64(0), BitString::new());
        assert_eq!(string_of_u64(3), "00".parse().unwrap());
        assert_eq!(string_of_u64(14), "111".parse().unwrap());
    }

    #[test]
    fn index_matches_hand_count() {
        // Independent oracle: generate strings in length-lex order by counting.
        let mut expected = Vec::new();
        expected.push(BitString::new());
        for len in 1..=12usize {
            for v in 0..(1u64 << len) {
                expected.push(BitString::from_value(v, len));
            }
        }
        for (i, x) in expected.iter().enumerate() {
            assert_eq!(index_of(x), BigUint::from(i));
            assert_eq!(&string_of(&BigUint::from(i)), x);
        }
        // Sorted order agrees with Ord.
        let mut sorted = expected.clone();
        sorted.sort();
        assert_eq!(sorted, expected);
    }

    #[test]
    fn round_trip_to_a_million() {
        for n in 0..1_000_000u64 {
            let big = BigUint::from(n);
            assert_eq!(index_of(&string_of(&big)), big);
        }
    }

    #[test]
    fn positional_equality() {
        let a: BitString = "0".parse().unwrap();
        let b: BitString = "00".parse().unwrap();
        assert_ne!(a, b);
        assert!(a < b);
    }

    #[test]
    fn display_round_trip() {
        for s in ["e", "0", "1", "0101", "111"] {
            let x: BitString = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
        }
        assert!("".parse::<BitString>().is_err());
        assert!("01x".parse::<BitString>().is_err());
    }
}

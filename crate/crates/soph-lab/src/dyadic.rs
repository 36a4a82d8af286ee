//! Exact nonnegative dyadic rationals: `num / 2^exp` with unbounded
//! numerator.
//!
//! Every semimeasure mass and halting-probability value in this crate is a
//! `Dyadic`. Addition, subtraction and comparison are exact; nothing in the
//! crate ever rounds. Canonical form keeps the fraction fully reduced: the
//! numerator is odd whenever the exponent is positive, and zero forces a
//! zero exponent.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::bits::BitString;
use crate::error::ParseError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigUint,
    exp: u64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { num: BigUint::ZERO, exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { num: BigUint::from(1u32), exp: 0 }
    }

    /// `2^{-e}`.
    pub fn pow2_neg(e: u64) -> Self {
        Dyadic { num: BigUint::from(1u32), exp: e }
    }

    /// `num / 2^exp`, reduced to canonical form.
    pub fn from_parts(num: BigUint, exp: u64) -> Self {
        let mut d = Dyadic { num, exp };
        d.canonicalize();
        d
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == BigUint::ZERO
    }

    fn canonicalize(&mut self) {
        if self.num == BigUint::ZERO {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(self.exp);
        if shift > 0 {
            self.num >>= shift;
            self.exp -= shift;
        }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let exp = self.exp.max(other.exp);
        let num = (&self.num << (exp - self.exp)) + (&other.num << (exp - other.exp));
        Dyadic::from_parts(num, exp)
    }

    /// Exact difference, or `None` when the result would be negative.
    pub fn checked_sub(&self, other: &Dyadic) -> Option<Dyadic> {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp);
        let b = &other.num << (exp - other.exp);
        if a < b {
            return None;
        }
        Some(Dyadic::from_parts(a - b, exp))
    }

    /// Multiply by `2^shift`; negative shifts divide.
    pub fn mul_pow2(&self, shift: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        if shift >= 0 {
            let shift = shift as u64;
            if self.exp >= shift {
                Dyadic { num: self.num.clone(), exp: self.exp - shift }
            } else {
                Dyadic { num: &self.num << (shift - self.exp), exp: 0 }
            }
        } else {
            Dyadic { num: self.num.clone(), exp: self.exp + shift.unsigned_abs() }
        }
    }

    /// Compare `self * 2^shift` with `other`, exactly.
    pub fn scaled_cmp(&self, shift: i64, other: &Dyadic) -> Ordering {
        self.mul_pow2(shift).cmp(other)
    }

    pub fn sum<'a>(values: impl IntoIterator<Item = &'a Dyadic>) -> Dyadic {
        let mut acc = Dyadic::zero();
        for v in values {
            acc = acc.add(v);
        }
        acc
    }

    /// Binary digit `i` (1-indexed) of the fractional expansion. Requires a
    /// value in `[0, 1)`; the expansion of a dyadic terminates, so digits
    /// beyond the exponent are zero.
    pub fn fraction_digit(&self, i: u64) -> u8 {
        assert!(i >= 1);
        assert!(
            self.cmp(&Dyadic::one()) == Ordering::Less,
            "fraction digits are defined for values below one"
        );
        if i > self.exp {
            0
        } else {
            u8::from(self.num.bit(self.exp - i))
        }
    }

    /// The first `n` fractional digits as a bit string.
    pub fn fraction_prefix(&self, n: usize) -> BitString {
        let mut out = BitString::new();
        for i in 1..=n as u64 {
            out.push(self.fraction_digit(i));
        }
        out
    }

    /// Value of `0.b_1 b_2 ... b_n` for a digit string.
    pub fn from_fraction_bits(bits: &BitString) -> Dyadic {
        let mut acc = Dyadic::zero();
        for (i, b) in bits.iter().enumerate() {
            if b == 1 {
                acc = acc.add(&Dyadic::pow2_neg(i as u64 + 1));
            }
        }
        acc
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp);
        let b = &other.num << (exp - other.exp);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

impl FromStr for Dyadic {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let (num, exp) = s
            .split_once("/2^")
            .ok_or_else(|| ParseError::new(format!("malformed dyadic {s:?}; expected num/2^exp")))?;
        let num: BigUint =
            num.parse().map_err(|_| ParseError::new(format!("bad dyadic numerator {num:?}")))?;
        let exp: u64 =
            exp.parse().map_err(|_| ParseError::new(format!("bad dyadic exponent {exp:?}")))?;
        Ok(Dyadic::from_parts(num, exp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn sum_examples() {
        assert_eq!(d("1/2^2").add(&d("1/2^2")), d("1/2^1"));
        assert_eq!(Dyadic::sum([].to_vec()), Dyadic::zero());
        let parts = [d("1/2^1"), d("1/2^2"), d("1/2^3"), d("1/2^4")];
        assert_eq!(Dyadic::sum(parts.iter()), d("15/2^4"));
    }

    #[test]
    fn canonical_form() {
        assert_eq!(d("4/2^4"), d("1/2^2"));
        assert_eq!(d("0/2^9"), Dyadic::zero());
        assert_eq!(Dyadic::zero().exponent(), 0);
        assert_eq!(d("6/2^1").to_string(), "3/2^0");
        // Integers keep exponent zero even when even.
        assert_eq!(d("12/2^0").to_string(), "12/2^0");
    }

    #[test]
    fn shifted_sums_are_order_independent() {
        // Deterministic xorshift shuffle over 10_000 masses.
        let mut rng = 0x243f6a8885a308d3u64;
        let mut next = move || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        let values: Vec<Dyadic> = (0..10_000)
            .map(|_| Dyadic::from_parts(BigUint::from(next() % 1000), next() % 40))
            .collect();
        let forward = Dyadic::sum(values.iter());
        let mut shuffled = values.clone();
        for i in (1..shuffled.len()).rev() {
            let j = (next() as usize) % (i + 1);
            shuffled.swap(i, j);
        }
        let backward = Dyadic::sum(shuffled.iter().rev());
        assert_eq!(forward, backward);
    }

    #[test]
    fn sub_and_cmp() {
        assert_eq!(d("3/2^2").checked_sub(&d("1/2^2")), Some(d("1/2^1")));
        assert_eq!(d("1/2^4").checked_sub(&d("1/2^2")), None);
        assert!(d("1/2^4") < d("1/2^3"));
        assert!(d("5/2^4") > d("1/2^2"));
    }

    #[test]
    fn pow2_scaling() {
        assert_eq!(d("1/2^4").mul_pow2(2), d("1/2^2"));
        assert_eq!(d("1/2^1").mul_pow2(3), d("4/2^0"));
        assert_eq!(d("1/2^1").mul_pow2(-3), d("1/2^4"));
        assert_eq!(d("3/2^2").scaled_cmp(1, &d("3/2^1")), Ordering::Equal);
    }

    #[test]
    fn fraction_digits() {
        let omega = d("3/2^5"); // 0.00011
        assert_eq!(omega.fraction_prefix(5).to_string(), "00011");
        assert_eq!(omega.fraction_prefix(7).to_string(), "0001100");
        let back = Dyadic::from_fraction_bits(&omega.fraction_prefix(5));
        assert_eq!(back, omega);
        assert_eq!(Dyadic::zero().fraction_prefix(3).to_string(), "000");
    }

    #[test]
    fn display_round_trip() {
        for s in ["0/2^0", "1/2^0", "5/2^4", "15/2^4", "12/2^0"] {
            assert_eq!(d(s).to_string(), s);
        }
        assert!("5".parse::<Dyadic>().is_err());
        assert!("x/2^4".parse::<Dyadic>().is_err());
    }
}

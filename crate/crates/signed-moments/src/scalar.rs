//! The scalar tower: exact rationals and 64-bit floats behind one trait.
//!
//! Every numeric operation in this crate is generic over [`Scalar`], with two
//! inhabitants: [`BigRational`] for exact arithmetic and `f64` for fast
//! approximate arithmetic. Exactness is chosen per call by picking the type
//! parameter, not by a global flag. Conversions between the two go through
//! [`Scalar::to_rational`], which is exact in both directions because every
//! finite `f64` is a dyadic rational.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Numeric scalar used throughout the crate.
///
/// Implementors are fields (up to rounding in the float case). `EXACT`
/// distinguishes the two arithmetic modes: algorithms that need certified
/// results (rank certificates, residual-zero solves) branch on it.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic never rounds.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    /// Exact embedding of a finite float.
    fn from_f64(x: f64) -> Self;

    fn from_rational(q: &BigRational) -> Self;

    /// Exact conversion into a rational. Finite floats convert losslessly;
    /// non-finite floats panic.
    fn to_rational(&self) -> BigRational;

    /// Nearest-float conversion (lossy for big rationals).
    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_f64(x: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(x)
            .expect("cannot embed a non-finite float into the rationals")
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn to_rational(&self) -> BigRational {
        self.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if Signed::is_negative(self) {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_rational(q: &BigRational) -> Self {
        Scalar::to_f64(q)
    }

    fn to_rational(&self) -> BigRational {
        <BigRational as FromPrimitive>::from_f64(*self)
            .expect("cannot convert a non-finite float into the rationals")
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

/// `base^exp` by binary exponentiation.
pub fn pow<S: Scalar>(base: &S, exp: u32) -> S {
    if exp == 0 {
        return S::one();
    }
    let mut acc = S::one();
    let mut sq = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * sq.clone();
        }
        e >>= 1;
        if e > 0 {
            sq = sq.clone() * sq;
        }
    }
    acc
}

/// Parses either a decimal literal or a `num/den` string into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let t = s.trim();
    if let Ok(q) = t.parse::<BigRational>() {
        return Ok(q);
    }
    // Decimal literals like "0.25" or "-1e-3" are accepted via exact f64 embedding.
    if let Ok(x) = t.parse::<f64>() {
        if x.is_finite() {
            return Ok(<BigRational as Scalar>::from_f64(x));
        }
    }
    Err(format!("not a rational number: {s:?}"))
}

/// Deterministic seed derivation (FNV-1a over the tag, folded with the base
/// seed and a counter). Stable across platforms and releases.
pub fn derive_seed(seed: u64, tag: &str, k: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^= seed;
    h = h.wrapping_mul(0x0000_0100_0000_01b3);
    h ^= k;
    h.wrapping_mul(0x0000_0100_0000_01b3)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn float_rational_round_trip_is_exact() {
        for x in [0.0, 1.5, -0.1, 3.25e-8, 1234.0] {
            let r = <f64 as Scalar>::to_rational(&x);
            assert_eq!(<BigRational as Scalar>::to_f64(&r), x);
        }
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let b = q(3, 7);
        let mut acc = BigRational::one();
        for e in 0..10u32 {
            assert_eq!(pow(&b, e), acc);
            acc *= b.clone();
        }
    }

    #[test]
    fn parse_accepts_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational("-7").unwrap(), q(-7, 1));
        assert_eq!(parse_rational("0.5").unwrap(), q(1, 2));
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn derived_seeds_differ_by_tag_and_counter() {
        let a = derive_seed(1, "sample", 0);
        let b = derive_seed(1, "sample", 1);
        let c = derive_seed(1, "escape", 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(1, "sample", 0));
    }
}

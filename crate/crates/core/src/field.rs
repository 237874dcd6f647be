//! Residue arithmetic modulo a runtime-chosen odd prime.
//!
//! [`FieldElement`] is a bare residue in `[0, p)`; all arithmetic goes
//! through the [`PrimeModulus`] that produced it. Products are formed in
//! `u128`, so any odd prime below `2^64` is supported.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeModulus(u64);

impl TryFrom<u64> for PrimeModulus {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        PrimeModulus::new(p)
    }
}

impl From<PrimeModulus> for u64 {
    fn from(p: PrimeModulus) -> u64 {
        p.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(Error::InvalidModulus { p, reason: "modulus must be an odd prime".into() });
        }
        if !is_prime(p) {
            return Err(Error::InvalidModulus { p, reason: "not prime".into() });
        }
        Ok(PrimeModulus(p))
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    /// Reduces an unsigned integer.
    #[inline]
    pub fn elem(self, v: u64) -> FieldElement {
        FieldElement(v % self.0)
    }

    /// Reduces a signed integer into `[0, p)`.
    #[inline]
    pub fn elem_i64(self, v: i64) -> FieldElement {
        FieldElement((v as i128).rem_euclid(self.0 as i128) as u64)
    }

    #[inline]
    pub fn zero(self) -> FieldElement {
        FieldElement(0)
    }

    #[inline]
    pub fn one(self) -> FieldElement {
        FieldElement(1)
    }

    #[inline]
    pub fn add(self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 as u128 + b.0 as u128;
        let p = self.0 as u128;
        FieldElement(if s >= p { (s - p) as u64 } else { s as u64 })
    }

    #[inline]
    pub fn sub(self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 >= b.0 {
            FieldElement(a.0 - b.0)
        } else {
            FieldElement(self.0 - (b.0 - a.0))
        }
    }

    #[inline]
    pub fn neg(self, a: FieldElement) -> FieldElement {
        if a.0 == 0 {
            a
        } else {
            FieldElement(self.0 - a.0)
        }
    }

    #[inline]
    pub fn mul(self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(((a.0 as u128 * b.0 as u128) % self.0 as u128) as u64)
    }

    pub fn pow(self, mut base: FieldElement, mut exp: u64) -> FieldElement {
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat's little theorem; `None` for zero.
    pub fn inv(self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            None
        } else {
            Some(self.pow(a, self.0 - 2))
        }
    }

    pub fn sum<I: IntoIterator<Item = FieldElement>>(self, it: I) -> FieldElement {
        it.into_iter().fold(self.zero(), |acc, x| self.add(acc, x))
    }

    pub fn product<I: IntoIterator<Item = FieldElement>>(self, it: I) -> FieldElement {
        it.into_iter().fold(self.one(), |acc, x| self.mul(acc, x))
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve prime bases are exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

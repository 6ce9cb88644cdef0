//! Toy group: the order-101 subgroup of the multiplicative group mod 607.
//!
//! 607 is prime and 606 = 2 · 3 · 101, so raising any unit to the sixth
//! power lands in the unique subgroup of order 101. Small enough that every
//! exponent, opening and response can be enumerated in a test.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::crypto::group::{Group, ScalarField};
use crate::crypto::CryptoError;
use crate::hash::hash32;

pub const TOY_P: u32 = 607;
pub const TOY_Q: u32 = 101;
const COFACTOR: u32 = (TOY_P - 1) / TOY_Q;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Toy101;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct ToyScalar(u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct ToyElement(u32);

impl ToyScalar {
    pub fn new(v: u32) -> Self {
        ToyScalar(v % TOY_Q)
    }

    pub fn value(&self) -> u32 {
        self.0
    }

    /// Every scalar in the field, `0..q`.
    pub fn all() -> impl Iterator<Item = ToyScalar> {
        (0..TOY_Q).map(ToyScalar)
    }
}

impl ToyElement {
    pub fn value(&self) -> u32 {
        self.0
    }

    /// Every element of the subgroup, in exponent order g^0 .. g^(q-1).
    pub fn all() -> impl Iterator<Item = ToyElement> {
        ToyScalar::all().map(|e| Toy101::exp_g(&e))
    }

    fn in_subgroup(v: u32) -> bool {
        (1..TOY_P).contains(&v) && pow_mod(v, TOY_Q) == 1
    }
}

impl TryFrom<u32> for ToyScalar {
    type Error = CryptoError;
    fn try_from(v: u32) -> Result<Self, CryptoError> {
        if v < TOY_Q {
            Ok(ToyScalar(v))
        } else {
            Err(CryptoError::InvalidEncoding("toy scalar out of range"))
        }
    }
}

impl From<ToyScalar> for u32 {
    fn from(s: ToyScalar) -> u32 {
        s.0
    }
}

impl TryFrom<u32> for ToyElement {
    type Error = CryptoError;
    fn try_from(v: u32) -> Result<Self, CryptoError> {
        if ToyElement::in_subgroup(v) {
            Ok(ToyElement(v))
        } else {
            Err(CryptoError::InvalidEncoding(
                "not in the order-101 subgroup",
            ))
        }
    }
}

impl From<ToyElement> for u32 {
    fn from(e: ToyElement) -> u32 {
        e.0
    }
}

fn pow_mod(base: u32, mut e: u32) -> u32 {
    let p = TOY_P as u64;
    let mut acc: u64 = 1;
    let mut b = base as u64 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc as u32
}

impl Add for ToyScalar {
    type Output = ToyScalar;
    fn add(self, rhs: ToyScalar) -> ToyScalar {
        ToyScalar((self.0 + rhs.0) % TOY_Q)
    }
}

impl Sub for ToyScalar {
    type Output = ToyScalar;
    fn sub(self, rhs: ToyScalar) -> ToyScalar {
        ToyScalar((self.0 + TOY_Q - rhs.0) % TOY_Q)
    }
}

impl Mul for ToyScalar {
    type Output = ToyScalar;
    fn mul(self, rhs: ToyScalar) -> ToyScalar {
        ToyScalar(self.0 * rhs.0 % TOY_Q)
    }
}

impl Neg for ToyScalar {
    type Output = ToyScalar;
    fn neg(self) -> ToyScalar {
        ToyScalar((TOY_Q - self.0) % TOY_Q)
    }
}

impl ScalarField for ToyScalar {
    fn zero() -> Self {
        ToyScalar(0)
    }

    fn one() -> Self {
        ToyScalar(1)
    }

    fn from_u64(v: u64) -> Self {
        ToyScalar((v % TOY_Q as u64) as u32)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0
    }

    fn invert(&self) -> Option<Self> {
        if self.0 == 0 {
            return None;
        }
        // Fermat: a^(q-2) mod q
        let q = TOY_Q as u64;
        let (mut acc, mut b, mut e) = (1u64, self.0 as u64, TOY_Q - 2);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % q;
            }
            b = b * b % q;
            e >>= 1;
        }
        Some(ToyScalar(acc as u32))
    }

    fn from_wide_bytes(bytes: &[u8; 64]) -> Self {
        let r = bytes
            .iter()
            .rev()
            .fold(0u32, |acc, &b| (acc * 256 + b as u32) % TOY_Q);
        ToyScalar(r)
    }

    fn to_bytes(&self) -> Vec<u8> {
        vec![self.0 as u8]
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        match bytes {
            [b] => ToyScalar::try_from(*b as u32),
            _ => Err(CryptoError::InvalidEncoding("toy scalar must be 1 byte")),
        }
    }
}

impl Group for Toy101 {
    type Scalar = ToyScalar;
    type Element = ToyElement;

    const NAME: &'static str = "toy101";

    fn generator() -> ToyElement {
        ToyElement(pow_mod(2, COFACTOR))
    }

    fn identity() -> ToyElement {
        ToyElement(1)
    }

    fn op(a: &ToyElement, b: &ToyElement) -> ToyElement {
        ToyElement(a.0 * b.0 % TOY_P)
    }

    fn exp(base: &ToyElement, e: &ToyScalar) -> ToyElement {
        ToyElement(pow_mod(base.0, e.0))
    }

    fn inverse(a: &ToyElement) -> ToyElement {
        ToyElement(pow_mod(a.0, TOY_Q - 1))
    }

    fn hash_to_element(domain: &[u8], msg: &[u8]) -> ToyElement {
        let mut counter = 0u32;
        loop {
            let d = hash32(domain, &[msg, &counter.to_le_bytes()]);
            let x = u32::from_le_bytes([d[0], d[1], d[2], d[3]]) % (TOY_P - 1) + 1;
            let y = pow_mod(x, COFACTOR);
            if y != 1 {
                return ToyElement(y);
            }
            counter += 1;
        }
    }

    fn encode(e: &ToyElement) -> Vec<u8> {
        (e.0 as u16).to_le_bytes().to_vec()
    }

    fn decode(bytes: &[u8]) -> Result<ToyElement, CryptoError> {
        let arr: [u8; 2] = bytes
            .try_into()
            .map_err(|_| CryptoError::InvalidEncoding("toy element must be 2 bytes"))?;
        ToyElement::try_from(u16::from_le_bytes(arr) as u32)
    }
}

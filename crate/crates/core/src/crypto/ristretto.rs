//! Production group: the Ristretto255 prime-order group.

use std::ops::{Add, Mul, Neg, Sub};

use curve25519_dalek::constants::RISTRETTO_BASEPOINT_POINT;
use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar as DalekScalar;
use curve25519_dalek::traits::Identity;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::crypto::group::{Group, ScalarField};
use crate::crypto::CryptoError;
use crate::hash::hash64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ristretto;

/// Integer modulo the Ristretto group order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Scalar(pub(crate) DalekScalar);

/// Element of the Ristretto255 group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupElement(pub(crate) RistrettoPoint);

impl std::hash::Hash for GroupElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.compress().as_bytes().hash(state);
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 - rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl ScalarField for Scalar {
    fn zero() -> Self {
        Scalar(DalekScalar::ZERO)
    }

    fn one() -> Self {
        Scalar(DalekScalar::ONE)
    }

    fn from_u64(v: u64) -> Self {
        Scalar(DalekScalar::from(v))
    }

    fn is_zero(&self) -> bool {
        self.0 == DalekScalar::ZERO
    }

    fn invert(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Scalar(self.0.invert()))
        }
    }

    fn from_wide_bytes(bytes: &[u8; 64]) -> Self {
        Scalar(DalekScalar::from_bytes_mod_order_wide(bytes))
    }

    fn to_bytes(&self) -> Vec<u8> {
        self.0.to_bytes().to_vec()
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let arr: [u8; 32] = bytes
            .try_into()
            .map_err(|_| CryptoError::InvalidEncoding("scalar must be 32 bytes"))?;
        Option::from(DalekScalar::from_canonical_bytes(arr))
            .map(Scalar)
            .ok_or(CryptoError::InvalidEncoding("non-canonical scalar"))
    }
}

impl Group for Ristretto {
    type Scalar = Scalar;
    type Element = GroupElement;

    const NAME: &'static str = "ristretto255";

    fn generator() -> GroupElement {
        GroupElement(RISTRETTO_BASEPOINT_POINT)
    }

    fn identity() -> GroupElement {
        GroupElement(RistrettoPoint::identity())
    }

    fn op(a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(a.0 + b.0)
    }

    fn exp(base: &GroupElement, e: &Scalar) -> GroupElement {
        GroupElement(base.0 * e.0)
    }

    fn inverse(a: &GroupElement) -> GroupElement {
        GroupElement(-a.0)
    }

    fn hash_to_element(domain: &[u8], msg: &[u8]) -> GroupElement {
        let wide = hash64(domain, &[msg]);
        GroupElement(RistrettoPoint::from_uniform_bytes(&wide))
    }

    fn encode(e: &GroupElement) -> Vec<u8> {
        e.0.compress().to_bytes().to_vec()
    }

    fn decode(bytes: &[u8]) -> Result<GroupElement, CryptoError> {
        let compressed = CompressedRistretto::from_slice(bytes)
            .map_err(|_| CryptoError::InvalidEncoding("group element must be 32 bytes"))?;
        compressed
            .decompress()
            .map(GroupElement)
            .ok_or(CryptoError::InvalidEncoding("not a ristretto point"))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(self.to_bytes()))
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let bytes = hex::decode(&text).map_err(serde::de::Error::custom)?;
        Scalar::from_bytes(&bytes).map_err(serde::de::Error::custom)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(Ristretto::encode(self)))
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let bytes = hex::decode(&text).map_err(serde::de::Error::custom)?;
        Ristretto::decode(&bytes).map_err(serde::de::Error::custom)
    }
}

impl GroupElement {
    pub fn to_hex(&self) -> String {
        hex::encode(Ristretto::encode(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_encoding_round_trips() {
        let p = Ristretto::exp_g(&Scalar::from_u64(12345));
        let bytes = Ristretto::encode(&p);
        assert_eq!(bytes.len(), 32);
        assert_eq!(Ristretto::decode(&bytes).unwrap(), p);
        let id = Ristretto::identity();
        assert_eq!(Ristretto::decode(&Ristretto::encode(&id)).unwrap(), id);
    }

    #[test]
    fn malformed_encodings_are_rejected() {
        assert!(Ristretto::decode(&[0u8; 31]).is_err());
        assert!(Ristretto::decode(&[0xffu8; 32]).is_err());
        assert!(Scalar::from_bytes(&[0xffu8; 32]).is_err());
    }

    #[test]
    fn scalar_is_little_endian() {
        let bytes = Scalar::from_u64(0x0102).to_bytes();
        assert_eq!(&bytes[..3], &[0x02, 0x01, 0x00]);
    }

    #[test]
    fn invert_zero_is_none() {
        assert!(Scalar::zero().invert().is_none());
        let seven = Scalar::from_u64(7);
        assert_eq!(seven * seven.invert().unwrap(), Scalar::one());
    }
}

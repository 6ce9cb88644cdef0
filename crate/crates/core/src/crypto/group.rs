//! Abstraction over a cyclic group of prime order.
//!
//! The group law is written multiplicatively (`op`, `exp`) to match the
//! usual presentation of Pedersen and Schnorr. Both the production group
//! (Ristretto255) and the exhaustively checkable toy group implement this
//! trait, so every protocol in this crate can be run against either.

use std::fmt::Debug;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::crypto::CryptoError;

/// Scalar field arithmetic modulo the group order.
pub trait ScalarField:
    Copy
    + Clone
    + Eq
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Serialize
    + DeserializeOwned
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_u64(v: u64) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse; `None` for zero.
    fn invert(&self) -> Option<Self>;
    /// Reduce 64 uniformly random bytes into a scalar.
    fn from_wide_bytes(bytes: &[u8; 64]) -> Self;
    /// Little-endian fixed-width encoding.
    fn to_bytes(&self) -> Vec<u8>;
    fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError>;
}

pub trait Group:
    Clone + Copy + Debug + Default + PartialEq + Eq + Hash + Send + Sync + 'static
{
    type Scalar: ScalarField;
    type Element: Copy
        + Clone
        + Eq
        + Hash
        + Debug
        + Send
        + Sync
        + Serialize
        + DeserializeOwned
        + 'static;

    /// Short name, used in domain separation.
    const NAME: &'static str;

    fn generator() -> Self::Element;
    fn identity() -> Self::Element;
    fn op(a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn exp(base: &Self::Element, e: &Self::Scalar) -> Self::Element;
    fn inverse(a: &Self::Element) -> Self::Element;

    /// Map arbitrary bytes to a group element whose discrete log is unknown.
    fn hash_to_element(domain: &[u8], msg: &[u8]) -> Self::Element;

    fn encode(e: &Self::Element) -> Vec<u8>;
    fn decode(bytes: &[u8]) -> Result<Self::Element, CryptoError>;

    fn exp_g(e: &Self::Scalar) -> Self::Element {
        Self::exp(&Self::generator(), e)
    }
}

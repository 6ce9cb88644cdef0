use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::crypto::{Group, GroupElement, Ristretto};
use crate::hash::hash32;

pub const ADDRESS_LEN: usize = 20;

/// Account identifier: the first 20 bytes of a hash of the public key.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address([u8; ADDRESS_LEN]);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid address {0:?}: expected {ADDRESS_LEN} hex-encoded bytes")]
pub struct AddressParseError(pub String);

impl Address {
    pub fn from_public_key(pk: &GroupElement) -> Self {
        let digest = hash32(b"willchain/address/v1", &[&Ristretto::encode(pk)]);
        let mut a = [0u8; ADDRESS_LEN];
        a.copy_from_slice(&digest[..ADDRESS_LEN]);
        Address(a)
    }

    pub const fn from_bytes(bytes: [u8; ADDRESS_LEN]) -> Self {
        Address(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; ADDRESS_LEN] {
        &self.0
    }

    /// Deterministic address for module-owned accounts (escrow, fee pool).
    pub fn module(name: &str) -> Self {
        let digest = hash32(b"willchain/module-address/v1", &[name.as_bytes()]);
        let mut a = [0u8; ADDRESS_LEN];
        a.copy_from_slice(&digest[..ADDRESS_LEN]);
        Address(a)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Address({self})")
    }
}

impl FromStr for Address {
    type Err = AddressParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let raw = s.strip_prefix("0x").unwrap_or(s);
        hex::decode(raw)
            .ok()
            .and_then(|v| <[u8; ADDRESS_LEN]>::try_from(v).ok())
            .map(Address)
            .ok_or_else(|| AddressParseError(s.to_string()))
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Address {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

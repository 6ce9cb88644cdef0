use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::address::Address;
use crate::crypto::{Group, GroupElement, Ristretto};
use crate::hash::{hash32, Digest32};

pub const DID_PREFIX: &str = "did:will:";

/// Identifier of a will, `did:will:<64 hex chars>`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Did(String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed DID {0:?}")]
pub struct DidParseError(pub String);

/// `H(creator pk ∥ creation nonce)`. The nonce keeps a creator's second
/// will from colliding with the first.
pub fn will_identifier(creator_pk: &GroupElement, nonce: u64) -> Digest32 {
    hash32(
        b"willchain/will-id/v1",
        &[&Ristretto::encode(creator_pk), &nonce.to_le_bytes()],
    )
}

impl Did {
    pub fn derive(creator_pk: &GroupElement, nonce: u64) -> Self {
        Did::from_identifier(&will_identifier(creator_pk, nonce))
    }

    pub fn from_identifier(id: &Digest32) -> Self {
        Did(format!("{DID_PREFIX}{}", hex::encode(id)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn identifier(&self) -> Digest32 {
        let mut out = [0u8; 32];
        hex::decode_to_slice(&self.0[DID_PREFIX.len()..], &mut out)
            .expect("validated at construction");
        out
    }
}

impl FromStr for Did {
    type Err = DidParseError;

    fn from_str(s: &str) -> Result<Self, DidParseError> {
        let ok = s
            .strip_prefix(DID_PREFIX)
            .map(|id| {
                id.len() == 64
                    && id
                        .bytes()
                        .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
            })
            .unwrap_or(false);
        if ok {
            Ok(Did(s.to_string()))
        } else {
            Err(DidParseError(s.to_string()))
        }
    }
}

impl fmt::Display for Did {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Did {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Did({})", self.0)
    }
}

impl Serialize for Did {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Did {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Non-transferable token minted to the creator of a will.
///
/// Fields are private and there is no setter: ownership is fixed at mint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoulboundToken {
    #[serde(with = "crate::codec::hex32")]
    token_id: Digest32,
    owner: Address,
    will: Did,
}

impl SoulboundToken {
    pub fn mint(creator_pk: &GroupElement, nonce: u64) -> Self {
        let token_id = will_identifier(creator_pk, nonce);
        SoulboundToken {
            token_id,
            owner: Address::from_public_key(creator_pk),
            will: Did::from_identifier(&token_id),
        }
    }

    pub fn token_id(&self) -> &Digest32 {
        &self.token_id
    }

    pub fn owner(&self) -> &Address {
        &self.owner
    }

    pub fn will(&self) -> &Did {
        &self.will
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::KeyPair;

    #[test]
    fn did_format_and_determinism() {
        let pk = KeyPair::from_seed(b"creator").public;
        let a = Did::derive(&pk, 0);
        assert!(a.as_str().starts_with("did:will:"));
        assert_eq!(a.as_str().len(), DID_PREFIX.len() + 64);
        assert_eq!(a, Did::derive(&pk, 0));
        assert_ne!(a, Did::derive(&pk, 1));
        assert_eq!(a.as_str().parse::<Did>().unwrap(), a);
        assert!("did:web:abc".parse::<Did>().is_err());
        assert!("did:will:XYZ".parse::<Did>().is_err());
    }

    #[test]
    fn token_matches_did_and_creator() {
        let pk = KeyPair::from_seed(b"creator").public;
        let t = SoulboundToken::mint(&pk, 3);
        assert_eq!(t.will(), &Did::derive(&pk, 3));
        assert_eq!(t.owner(), &Address::from_public_key(&pk));
        assert_eq!(&t.will().identifier(), t.token_id());
    }
}

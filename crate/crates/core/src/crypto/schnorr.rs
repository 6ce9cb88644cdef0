//! Schnorr signatures and their aggregation.
//!
//! Aggregation sums the responses of individually valid signatures while
//! keeping each signer's nonce point, so the verifier can recompute the
//! per-signer challenge `c_i = H(R_i ∥ pk_i ∥ msg)` and check
//!
//! ```text
//! g^(Σ s_i) = Π (R_i · pk_i^c_i)
//! ```
//!
//! Keys must be registered with a proof of possession before they can take
//! part in an aggregate; that closes the rogue-key attack a plain sum of
//! signatures is exposed to.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::crypto::dlog::{self, DlogProof};
use crate::crypto::group::{Group, ScalarField};
use crate::crypto::nonce::NonceSource;
use crate::crypto::CryptoError;
use crate::hash::hash64;

const SCHNORR_DOMAIN: &[u8] = b"willchain/schnorr/v1";
const KEYGEN_DOMAIN: &[u8] = b"willchain/keygen/v1";
const POP_CONTEXT: &[u8] = b"willchain/pop/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyPair<G: Group> {
    secret: G::Scalar,
    pub public: G::Element,
}

impl<G: Group> KeyPair<G> {
    pub fn from_secret(secret: G::Scalar) -> Result<Self, CryptoError> {
        if secret.is_zero() {
            return Err(CryptoError::ZeroSecret);
        }
        Ok(KeyPair {
            secret,
            public: G::exp_g(&secret),
        })
    }

    /// Test and scenario keys: the secret is derived from `seed` by hashing.
    pub fn from_seed(seed: &[u8]) -> Self {
        let mut counter = 0u32;
        loop {
            let wide = hash64(
                KEYGEN_DOMAIN,
                &[G::NAME.as_bytes(), seed, &counter.to_le_bytes()],
            );
            if let Ok(kp) = Self::from_secret(G::Scalar::from_wide_bytes(&wide)) {
                return kp;
            }
            counter += 1;
        }
    }

    pub fn secret(&self) -> &G::Scalar {
        &self.secret
    }

    /// Self-signed knowledge proof used to register this key for aggregation.
    pub fn possession_proof(&self, nonces: &mut NonceSource) -> DlogProof<G> {
        dlog::prove(self, &pop_context::<G>(&self.public), nonces)
    }
}

fn pop_context<G: Group>(pk: &G::Element) -> Vec<u8> {
    [POP_CONTEXT, &G::encode(pk)].concat()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SchnorrSignature<G: Group> {
    pub nonce_point: G::Element,
    pub response: G::Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AggregateSignature<G: Group> {
    pub nonce_points: Vec<G::Element>,
    pub response_sum: G::Scalar,
    pub signer_pks: Vec<G::Element>,
}

pub fn challenge<G: Group>(nonce_point: &G::Element, pk: &G::Element, msg: &[u8]) -> G::Scalar {
    let wide = hash64(
        SCHNORR_DOMAIN,
        &[&G::encode(nonce_point), &G::encode(pk), msg],
    );
    G::Scalar::from_wide_bytes(&wide)
}

pub fn sign<G: Group>(
    kp: &KeyPair<G>,
    msg: &[u8],
    nonces: &mut NonceSource,
) -> SchnorrSignature<G> {
    let k = nonces.next::<G>(kp.secret(), &[SCHNORR_DOMAIN, msg].concat());
    let nonce_point = G::exp_g(&k);
    let c = challenge::<G>(&nonce_point, &kp.public, msg);
    SchnorrSignature {
        nonce_point,
        response: k + c * *kp.secret(),
    }
}

pub fn verify<G: Group>(pk: &G::Element, msg: &[u8], sig: &SchnorrSignature<G>) -> bool {
    let c = challenge::<G>(&sig.nonce_point, pk, msg);
    G::exp_g(&sig.response) == G::op(&sig.nonce_point, &G::exp(pk, &c))
}

/// Verification over raw encodings; signature bytes are `enc(R) ∥ enc(s)`.
pub fn verify_encoded<G: Group>(pk: &[u8], msg: &[u8], sig: &[u8]) -> Result<bool, CryptoError> {
    let pk = G::decode(pk)?;
    let sig = SchnorrSignature::<G>::from_bytes(sig)?;
    Ok(verify::<G>(&pk, msg, &sig))
}

impl<G: Group> SchnorrSignature<G> {
    pub fn to_bytes(&self) -> Vec<u8> {
        [G::encode(&self.nonce_point), self.response.to_bytes()].concat()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let width = G::encode(&G::identity()).len();
        if bytes.len() <= width {
            return Err(CryptoError::InvalidEncoding("signature too short"));
        }
        Ok(SchnorrSignature {
            nonce_point: G::decode(&bytes[..width])?,
            response: G::Scalar::from_bytes(&bytes[width..])?,
        })
    }
}

/// Public keys that have proven possession of their secret.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct KeyRegistry<G: Group> {
    #[serde(with = "hex_set")]
    registered: BTreeSet<Vec<u8>>,
    #[serde(skip)]
    _group: std::marker::PhantomData<G>,
}

impl<G: Group> KeyRegistry<G> {
    pub fn new() -> Self {
        KeyRegistry {
            registered: BTreeSet::new(),
            _group: std::marker::PhantomData,
        }
    }

    pub fn register(&mut self, pk: &G::Element, pop: &DlogProof<G>) -> Result<(), CryptoError> {
        if !dlog::verify(pk, &pop_context::<G>(pk), pop) {
            return Err(CryptoError::InvalidPossessionProof);
        }
        self.registered.insert(G::encode(pk));
        Ok(())
    }

    pub fn is_registered(&self, pk: &G::Element) -> bool {
        self.registered.contains(&G::encode(pk))
    }

    pub fn len(&self) -> usize {
        self.registered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registered.is_empty()
    }
}

impl<G: Group> Default for KeyRegistry<G> {
    fn default() -> Self {
        Self::new()
    }
}

/// Aggregates signatures on a common message. Every member must verify on
/// its own and carry a registered key; signer order is preserved.
pub fn aggregate<G: Group>(
    members: &[(SchnorrSignature<G>, G::Element)],
    msg: &[u8],
    registry: &KeyRegistry<G>,
) -> Result<AggregateSignature<G>, CryptoError> {
    if members.is_empty() {
        return Err(CryptoError::AggregationRejected {
            index: 0,
            reason: "no signatures",
        });
    }
    let mut response_sum = G::Scalar::zero();
    for (index, (sig, pk)) in members.iter().enumerate() {
        if !registry.is_registered(pk) {
            return Err(CryptoError::AggregationRejected {
                index,
                reason: "public key has no proof of possession",
            });
        }
        if !verify::<G>(pk, msg, sig) {
            return Err(CryptoError::AggregationRejected {
                index,
                reason: "signature does not verify",
            });
        }
        response_sum = response_sum + sig.response;
    }
    Ok(AggregateSignature {
        nonce_points: members.iter().map(|(s, _)| s.nonce_point).collect(),
        response_sum,
        signer_pks: members.iter().map(|(_, pk)| *pk).collect(),
    })
}

pub fn aggregate_verify<G: Group>(
    agg: &AggregateSignature<G>,
    msg: &[u8],
) -> Result<bool, CryptoError> {
    if agg.nonce_points.len() != agg.signer_pks.len() {
        return Err(CryptoError::InvalidEncoding(
            "nonce and signer lists differ in length",
        ));
    }
    if agg.signer_pks.is_empty() {
        return Err(CryptoError::InvalidEncoding("empty aggregate"));
    }
    let rhs = agg
        .nonce_points
        .iter()
        .zip(&agg.signer_pks)
        .fold(G::identity(), |acc, (r, pk)| {
            let c = challenge::<G>(r, pk, msg);
            G::op(&acc, &G::op(r, &G::exp(pk, &c)))
        });
    Ok(G::exp_g(&agg.response_sum) == rhs)
}

mod hex_set {
    use std::collections::BTreeSet;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(set: &BTreeSet<Vec<u8>>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(set.iter().map(hex::encode))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeSet<Vec<u8>>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|h| hex::decode(h).map_err(serde::de::Error::custom))
            .collect()
    }
}

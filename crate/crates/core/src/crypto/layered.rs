//! Two-layer hybrid encryption for key revelation.
//!
//! Each layer is a KEM over the group (`kem = g^e`, shared point `pk^e`)
//! followed by a SHA-256 counter-mode keystream and an HMAC-SHA256 tag
//! over `kem ∥ body`. The message is sealed to the beneficiary key first;
//! the result is sealed again to a temporary key whose secret is released
//! once the will has expired.

use hmac::{Hmac, Mac};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::crypto::group::{Group, ScalarField};
use crate::crypto::CryptoError;
use crate::hash::hash64;

const LAYER_DOMAIN: &[u8] = b"willchain/layer/v1";
const TAG_LEN: usize = 32;

type HmacSha256 = Hmac<Sha256>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LayeredCiphertext<G: Group> {
    pub outer_kem: G::Element,
    #[serde(with = "crate::codec::hex_bytes")]
    pub outer_body: Vec<u8>,
    #[serde(with = "crate::codec::hex_bytes")]
    pub tag: Vec<u8>,
}

struct Sealed<G: Group> {
    kem: G::Element,
    body: Vec<u8>,
    tag: Vec<u8>,
}

fn layer_keys<G: Group>(kem: &G::Element, shared: &G::Element) -> ([u8; 32], [u8; 32]) {
    let wide = hash64(LAYER_DOMAIN, &[&G::encode(kem), &G::encode(shared)]);
    let mut enc = [0u8; 32];
    let mut mac = [0u8; 32];
    enc.copy_from_slice(&wide[..32]);
    mac.copy_from_slice(&wide[32..]);
    (enc, mac)
}

fn apply_keystream(key: &[u8; 32], data: &mut [u8]) {
    for (block, chunk) in data.chunks_mut(32).enumerate() {
        let pad = Sha256::new()
            .chain_update(key)
            .chain_update((block as u64).to_le_bytes())
            .finalize();
        for (b, p) in chunk.iter_mut().zip(pad.iter()) {
            *b ^= p;
        }
    }
}

fn mac<G: Group>(key: &[u8; 32], kem: &G::Element, body: &[u8]) -> HmacSha256 {
    let mut m = HmacSha256::new_from_slice(key).expect("hmac accepts any key length");
    m.update(&G::encode(kem));
    m.update(body);
    m
}

fn random_nonzero<G: Group>(rng: &mut impl RngCore) -> G::Scalar {
    loop {
        let mut wide = [0u8; 64];
        rng.fill_bytes(&mut wide);
        let e = G::Scalar::from_wide_bytes(&wide);
        if !e.is_zero() {
            return e;
        }
    }
}

fn seal<G: Group>(data: &[u8], pk: &G::Element, rng: &mut impl RngCore) -> Sealed<G> {
    let e = random_nonzero::<G>(rng);
    let kem = G::exp_g(&e);
    let (enc_key, mac_key) = layer_keys::<G>(&kem, &G::exp(pk, &e));
    let mut body = data.to_vec();
    apply_keystream(&enc_key, &mut body);
    let tag = mac::<G>(&mac_key, &kem, &body)
        .finalize()
        .into_bytes()
        .to_vec();
    Sealed { kem, body, tag }
}

fn open<G: Group>(sealed: &Sealed<G>, sk: &G::Scalar) -> Result<Vec<u8>, CryptoError> {
    let (enc_key, mac_key) = layer_keys::<G>(&sealed.kem, &G::exp(&sealed.kem, sk));
    mac::<G>(&mac_key, &sealed.kem, &sealed.body)
        .verify_slice(&sealed.tag)
        .map_err(|_| CryptoError::DecryptionFailure)?;
    let mut out = sealed.body.clone();
    apply_keystream(&enc_key, &mut out);
    Ok(out)
}

fn element_width<G: Group>() -> usize {
    G::encode(&G::identity()).len()
}

impl<G: Group> Sealed<G> {
    /// `enc(kem) ∥ tag ∥ body`
    fn to_bytes(&self) -> Vec<u8> {
        [G::encode(&self.kem), self.tag.clone(), self.body.clone()].concat()
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let w = element_width::<G>();
        if bytes.len() < w + TAG_LEN {
            return Err(CryptoError::DecryptionFailure);
        }
        let kem = G::decode(&bytes[..w]).map_err(|_| CryptoError::DecryptionFailure)?;
        Ok(Sealed {
            kem,
            tag: bytes[w..w + TAG_LEN].to_vec(),
            body: bytes[w + TAG_LEN..].to_vec(),
        })
    }
}

/// `E_kt(E_kb(data))`.
pub fn layered_encrypt<G: Group>(
    data: &[u8],
    beneficiary_pk: &G::Element,
    temporary_pk: &G::Element,
    rng: &mut impl RngCore,
) -> LayeredCiphertext<G> {
    let inner = seal::<G>(data, beneficiary_pk, rng).to_bytes();
    let outer = seal::<G>(&inner, temporary_pk, rng);
    LayeredCiphertext {
        outer_kem: outer.kem,
        outer_body: outer.body,
        tag: outer.tag,
    }
}

/// Removes the temporary-key layer and returns the inner ciphertext.
pub fn layered_decrypt_outer<G: Group>(
    c: &LayeredCiphertext<G>,
    temporary_sk: &G::Scalar,
) -> Result<Vec<u8>, CryptoError> {
    open(
        &Sealed::<G> {
            kem: c.outer_kem,
            body: c.outer_body.clone(),
            tag: c.tag.clone(),
        },
        temporary_sk,
    )
}

pub fn layered_decrypt_inner<G: Group>(
    inner: &[u8],
    beneficiary_sk: &G::Scalar,
) -> Result<Vec<u8>, CryptoError> {
    open(&Sealed::<G>::from_bytes(inner)?, beneficiary_sk)
}

//! Non-interactive proof of knowledge of a discrete logarithm.
//!
//! Schnorr's sigma protocol made non-interactive with Fiat-Shamir: the
//! prover shows it knows `x` with `P = g^x` without revealing `x`. The
//! `context` string is bound into the challenge, so a proof is only valid
//! for the statement it was produced for.

use serde::{Deserialize, Serialize};

use crate::crypto::group::{Group, ScalarField};
use crate::crypto::nonce::NonceSource;
use crate::crypto::schnorr::KeyPair;
use crate::crypto::CryptoError;
use crate::hash::hash64;

const DLOG_DOMAIN: &[u8] = b"willchain/dlog/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DlogProof<G: Group> {
    pub commitment: G::Element,
    pub response: G::Scalar,
}

pub fn challenge<G: Group>(
    commitment: &G::Element,
    statement: &G::Element,
    context: &[u8],
) -> G::Scalar {
    let wide = hash64(
        DLOG_DOMAIN,
        &[&G::encode(commitment), &G::encode(statement), context],
    );
    G::Scalar::from_wide_bytes(&wide)
}

pub fn prove<G: Group>(kp: &KeyPair<G>, context: &[u8], nonces: &mut NonceSource) -> DlogProof<G> {
    let k = nonces.next::<G>(kp.secret(), &[DLOG_DOMAIN, context].concat());
    prove_with_nonce(kp, context, &k)
}

/// Proof with a caller-chosen nonce. Reusing a nonce across two contexts
/// leaks the secret; [`prove`] never does.
pub fn prove_with_nonce<G: Group>(
    kp: &KeyPair<G>,
    context: &[u8],
    nonce: &G::Scalar,
) -> DlogProof<G> {
    let commitment = G::exp_g(nonce);
    let c = challenge::<G>(&commitment, &kp.public, context);
    DlogProof {
        commitment,
        response: *nonce + c * *kp.secret(),
    }
}

/// Checks `g^z = R · P^c`.
pub fn verify<G: Group>(statement: &G::Element, context: &[u8], proof: &DlogProof<G>) -> bool {
    let c = challenge::<G>(&proof.commitment, statement, context);
    G::exp_g(&proof.response) == G::op(&proof.commitment, &G::exp(statement, &c))
}

/// Verification over raw encodings: `statement` is a group element,
/// `proof` is `enc(R) ∥ enc(z)`.
pub fn verify_encoded<G: Group>(
    statement: &[u8],
    context: &[u8],
    proof: &[u8],
) -> Result<bool, CryptoError> {
    let p = G::decode(statement)?;
    let width = G::encode(&G::identity()).len();
    if proof.len() <= width {
        return Err(CryptoError::InvalidEncoding("proof too short"));
    }
    let commitment = G::decode(&proof[..width])?;
    let response = G::Scalar::from_bytes(&proof[width..])?;
    Ok(verify::<G>(
        &p,
        context,
        &DlogProof {
            commitment,
            response,
        },
    ))
}

impl<G: Group> DlogProof<G> {
    pub fn to_bytes(&self) -> Vec<u8> {
        [G::encode(&self.commitment), self.response.to_bytes()].concat()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::ristretto::Ristretto;
    use crate::crypto::toy::{Toy101, ToyElement, ToyScalar};

    #[test]
    fn round_trip_and_context_binding() {
        let kp = KeyPair::<Ristretto>::from_seed(b"prover");
        let mut nonces = NonceSource::from_u64(1);
        let proof = prove(&kp, b"ctx-a", &mut nonces);
        assert!(verify(&kp.public, b"ctx-a", &proof));
        assert!(!verify(&kp.public, b"ctx-b", &proof));
        assert!(verify_encoded::<Ristretto>(
            &Ristretto::encode(&kp.public),
            b"ctx-a",
            &proof.to_bytes()
        )
        .unwrap());
    }

    #[test]
    fn malformed_encoding_is_an_error() {
        let kp = KeyPair::<Ristretto>::from_seed(b"prover");
        assert!(
            verify_encoded::<Ristretto>(&Ristretto::encode(&kp.public), b"x", &[1, 2, 3]).is_err()
        );
        assert!(verify_encoded::<Ristretto>(&[0xff; 32], b"x", &[0u8; 64]).is_err());
    }

    #[test]
    fn nonce_reuse_leaks_the_secret() {
        let kp = KeyPair::<Ristretto>::from_seed(b"careless");
        let k = crate::crypto::Scalar::from_u64(987_654_321);
        let p1 = prove_with_nonce(&kp, b"context one", &k);
        let p2 = prove_with_nonce(&kp, b"context two", &k);
        assert_eq!(p1.commitment, p2.commitment);
        let c1 = challenge::<Ristretto>(&p1.commitment, &kp.public, b"context one");
        let c2 = challenge::<Ristretto>(&p2.commitment, &kp.public, b"context two");
        let extracted = (p1.response - p2.response) * (c1 - c2).invert().unwrap();
        assert_eq!(Ristretto::exp_g(&extracted), kp.public);
    }

    // Soundness in the toy group: for a fixed commitment R, exactly one
    // response is accepted, and it is the one computed from the true
    // exponent. Enumerates every (R, z) pair.
    #[test]
    fn toy_exhaustive_soundness() {
        let kp = KeyPair::<Toy101>::from_secret(ToyScalar::new(42)).unwrap();
        for r_exp in ToyScalar::all() {
            let commitment: ToyElement = Toy101::exp_g(&r_exp);
            let c = challenge::<Toy101>(&commitment, &kp.public, b"toy");
            let accepted: Vec<ToyScalar> = ToyScalar::all()
                .filter(|z| {
                    verify::<Toy101>(
                        &kp.public,
                        b"toy",
                        &DlogProof {
                            commitment,
                            response: *z,
                        },
                    )
                })
                .collect();
            assert_eq!(accepted, vec![r_exp + c * ToyScalar::new(42)]);
        }
    }
}

//! Prime-order group cryptography used by wills and claims.
//!
//! Every primitive is generic over [`Group`]; the aliases at the bottom of
//! this module pin them to Ristretto255 for the rest of the crate.

pub mod dlog;
pub mod group;
pub mod layered;
pub mod nonce;
pub mod pedersen;
pub mod ristretto;
pub mod schnorr;
pub mod toy;

use thiserror::Error;

pub use group::{Group, ScalarField};
pub use nonce::NonceSource;
pub use ristretto::{GroupElement, Ristretto, Scalar};
pub use toy::{Toy101, ToyElement, ToyScalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CryptoError {
    #[error("invalid encoding: {0}")]
    InvalidEncoding(&'static str),
    #[error("aggregation rejected: member {index}: {reason}")]
    AggregationRejected { index: usize, reason: &'static str },
    #[error("decryption failure: authentication tag mismatch")]
    DecryptionFailure,
    #[error("proof of possession does not verify")]
    InvalidPossessionProof,
    #[error("secret key must be nonzero")]
    ZeroSecret,
}

pub type KeyPair = schnorr::KeyPair<Ristretto>;
pub type SchnorrSignature = schnorr::SchnorrSignature<Ristretto>;
pub type AggregateSignature = schnorr::AggregateSignature<Ristretto>;
pub type KeyRegistry = schnorr::KeyRegistry<Ristretto>;
pub type DlogProof = dlog::DlogProof<Ristretto>;
pub type PedersenParams = pedersen::PedersenParams<Ristretto>;
pub type Commitment = pedersen::Commitment<Ristretto>;
pub type LayeredCiphertext = layered::LayeredCiphertext<Ristretto>;

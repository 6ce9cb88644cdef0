//! Claim evidence and the verification dispatch for each claim type.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::address::Address;
use crate::crypto::{
    dlog, schnorr, AggregateSignature, Commitment, CryptoError, DlogProof, Group, GroupElement,
    PedersenParams, Ristretto, Scalar, SchnorrSignature,
};
use crate::hash::{hash32, sha256, Digest32};
use crate::will::{AccessControl, Did};

/// Message a beneficiary signs at setup for a signature-proof claim.
pub const SIGNATURE_PROOF_CHALLENGE: &[u8] = b"willchain/signature-proof/challenge/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimType {
    Direct,
    SchnorrClaim,
    PedersenClaim,
    GnarkClaim,
    SignatureProof,
}

impl ClaimType {
    pub const ALL: [ClaimType; 5] = [
        ClaimType::Direct,
        ClaimType::SchnorrClaim,
        ClaimType::PedersenClaim,
        ClaimType::GnarkClaim,
        ClaimType::SignatureProof,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClaimType::Direct => "direct",
            ClaimType::SchnorrClaim => "schnorr-claim",
            ClaimType::PedersenClaim => "pedersen-claim",
            ClaimType::GnarkClaim => "gnark-claim",
            ClaimType::SignatureProof => "signature-proof",
        }
    }
}

impl fmt::Display for ClaimType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimType {
    type Err = ClaimError;

    fn from_str(s: &str) -> Result<Self, ClaimError> {
        ClaimType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| ClaimError::UnsupportedClaim(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClaimError {
    #[error("evidence of kind {evidence} cannot satisfy a {claim_type} requirement")]
    EvidenceType {
        claim_type: ClaimType,
        evidence: &'static str,
    },
    #[error("unsupported claim type {0:?}")]
    UnsupportedClaim(String),
    #[error("requirement is malformed: {0}")]
    MalformedRequirement(&'static str),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
}

/// What the will stores to check a claim against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expected {
    BeneficiaryAddress {
        address: Address,
    },
    Commitment {
        commitment: Commitment,
    },
    SignerSet {
        signers: Vec<GroupElement>,
    },
    StatementKey {
        key: GroupElement,
    },
    SignatureHash {
        #[serde(with = "crate::codec::hex32")]
        hash: Digest32,
        beneficiary_key: GroupElement,
    },
}

impl Expected {
    fn claim_type(&self) -> ClaimType {
        match self {
            Expected::BeneficiaryAddress { .. } => ClaimType::Direct,
            Expected::Commitment { .. } => ClaimType::PedersenClaim,
            Expected::SignerSet { .. } => ClaimType::SchnorrClaim,
            Expected::StatementKey { .. } => ClaimType::GnarkClaim,
            Expected::SignatureHash { .. } => ClaimType::SignatureProof,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimRequirement {
    pub claim_type: ClaimType,
    pub expected: Expected,
    pub access: AccessControl,
}

impl ClaimRequirement {
    pub fn new(expected: Expected, access: AccessControl) -> Result<Self, ClaimError> {
        let req = ClaimRequirement {
            claim_type: expected.claim_type(),
            expected,
            access,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<(), ClaimError> {
        if self.expected.claim_type() != self.claim_type {
            return Err(ClaimError::MalformedRequirement(
                "expected value does not match claim type",
            ));
        }
        if !self.access.is_valid() {
            return Err(ClaimError::MalformedRequirement(
                "private access list is empty",
            ));
        }
        if let Expected::SignerSet { signers } = &self.expected {
            if signers.is_empty() {
                return Err(ClaimError::MalformedRequirement("signer set is empty"));
            }
        }
        Ok(())
    }
}

/// Evidence a claimant submits.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClaimEvidence {
    DirectSig {
        signature: SchnorrSignature,
        public_key: GroupElement,
    },
    PedersenOpening {
        m: Scalar,
        r: Scalar,
    },
    Aggregate {
        aggregate: AggregateSignature,
    },
    KnowledgeProof {
        proof: DlogProof,
    },
    SignatureReveal {
        signature: SchnorrSignature,
    },
}

impl ClaimEvidence {
    pub fn kind(&self) -> &'static str {
        match self {
            ClaimEvidence::DirectSig { .. } => "direct_sig",
            ClaimEvidence::PedersenOpening { .. } => "pedersen_opening",
            ClaimEvidence::Aggregate { .. } => "aggregate",
            ClaimEvidence::KnowledgeProof { .. } => "knowledge_proof",
            ClaimEvidence::SignatureReveal { .. } => "signature_reveal",
        }
    }
}

// Pedersen openings are secrets; keep them out of any debug output.
impl fmt::Debug for ClaimEvidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClaimEvidence::PedersenOpening { .. } => f.write_str("PedersenOpening { .. }"),
            ClaimEvidence::DirectSig {
                signature,
                public_key,
            } => f
                .debug_struct("DirectSig")
                .field("signature", signature)
                .field("public_key", public_key)
                .finish(),
            ClaimEvidence::Aggregate { aggregate } => f
                .debug_struct("Aggregate")
                .field("aggregate", aggregate)
                .finish(),
            ClaimEvidence::KnowledgeProof { proof } => f
                .debug_struct("KnowledgeProof")
                .field("proof", proof)
                .finish(),
            ClaimEvidence::SignatureReveal { signature } => f
                .debug_struct("SignatureReveal")
                .field("signature", signature)
                .finish(),
        }
    }
}

/// `H(did ∥ component ∥ claimant ∥ chain)`: the message every piece of
/// evidence is bound to.
pub fn claim_message(
    did: &Did,
    component_id: &str,
    claimant: &Address,
    chain_id: &str,
) -> Digest32 {
    hash32(
        b"willchain/claim-msg/v1",
        &[
            did.as_str().as_bytes(),
            component_id.as_bytes(),
            claimant.as_bytes(),
            chain_id.as_bytes(),
        ],
    )
}

/// `h_s` stored by the creator for a signature-proof claim.
pub fn signature_hash(sig: &SchnorrSignature) -> Digest32 {
    sha256(&sig.to_bytes())
}

fn sorted_encodings(keys: &[GroupElement]) -> Vec<Vec<u8>> {
    let mut v: Vec<_> = keys.iter().map(Ristretto::encode).collect();
    v.sort();
    v
}

pub fn verify_claim(
    req: &ClaimRequirement,
    ev: &ClaimEvidence,
    claim_msg: &[u8],
) -> Result<bool, ClaimError> {
    let mismatch = || ClaimError::EvidenceType {
        claim_type: req.claim_type,
        evidence: ev.kind(),
    };
    if req.expected.claim_type() != req.claim_type {
        return Err(ClaimError::MalformedRequirement(
            "expected value does not match claim type",
        ));
    }
    match (&req.expected, ev) {
        (
            Expected::BeneficiaryAddress { address },
            ClaimEvidence::DirectSig {
                signature,
                public_key,
            },
        ) => Ok(Address::from_public_key(public_key) == *address
            && schnorr::verify(public_key, claim_msg, signature)),
        (Expected::Commitment { commitment }, ClaimEvidence::PedersenOpening { m, r }) => {
            Ok(PedersenParams::standard().verify_opening(commitment, m, r))
        }
        (Expected::SignerSet { signers }, ClaimEvidence::Aggregate { aggregate }) => {
            if sorted_encodings(signers) != sorted_encodings(&aggregate.signer_pks) {
                return Ok(false);
            }
            Ok(schnorr::aggregate_verify(aggregate, claim_msg)?)
        }
        (Expected::StatementKey { key }, ClaimEvidence::KnowledgeProof { proof }) => {
            Ok(dlog::verify(key, claim_msg, proof))
        }
        (
            Expected::SignatureHash {
                hash,
                beneficiary_key,
            },
            ClaimEvidence::SignatureReveal { signature },
        ) => Ok(signature_hash(signature) == *hash
            && schnorr::verify(beneficiary_key, SIGNATURE_PROOF_CHALLENGE, signature)),
        _ => Err(mismatch()),
    }
}

pub fn check_access(req: &ClaimRequirement, caller: &Address) -> bool {
    req.access.allows(caller)
}

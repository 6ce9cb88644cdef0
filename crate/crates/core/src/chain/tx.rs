use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::address::Address;
use crate::chain::ChainError;
use crate::claims::ClaimEvidence;
use crate::codec;
use crate::crypto::schnorr;
use crate::crypto::{DlogProof, GroupElement, KeyPair, NonceSource, Ristretto, SchnorrSignature};
use crate::will::{ComponentSpec, Did, WillDraft};

/// A will as submitted by its creator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WillDefinition {
    pub expiration: u64,
    pub components: Vec<ComponentSpec>,
    #[serde(default)]
    pub beneficiaries: Vec<Address>,
    /// Refungible shares over `rft_escrow`; empty for none.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub shares: BTreeMap<Address, u64>,
    #[serde(default)]
    pub rft_escrow: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claim_window: Option<u64>,
}

impl WillDefinition {
    pub fn draft(&self, default_window: u64) -> WillDraft {
        WillDraft {
            expiration: self.expiration,
            components: self.components.clone(),
            beneficiaries: self.beneficiaries.clone(),
            claim_window: Some(self.claim_window.unwrap_or(default_window)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TxBody {
    CreateWill {
        will: WillDefinition,
    },
    Checkin {
        did: Did,
    },
    Claim {
        did: Did,
        component: String,
        evidence: ClaimEvidence,
    },
    Transfer {
        to: Address,
        amount: u64,
        denom: String,
    },
    ApproveContract {
        chain_id: String,
        address: String,
    },
    RegisterKey {
        proof: DlogProof,
    },
    RftClaim {
        did: Did,
    },
    Noop,
}

impl TxBody {
    pub fn name(&self) -> &'static str {
        match self {
            TxBody::CreateWill { .. } => "create_will",
            TxBody::Checkin { .. } => "checkin",
            TxBody::Claim { .. } => "claim",
            TxBody::Transfer { .. } => "transfer",
            TxBody::ApproveContract { .. } => "approve_contract",
            TxBody::RegisterKey { .. } => "register_key",
            TxBody::RftClaim { .. } => "rft_claim",
            TxBody::Noop => "noop",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tx {
    pub sender: Address,
    pub sequence: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fee_payer: Option<Address>,
    pub body: TxBody,
}

#[derive(Serialize)]
struct SignDoc<'a> {
    chain_id: &'a str,
    tx: &'a Tx,
}

impl Tx {
    pub fn sign_bytes(&self, chain_id: &str) -> Vec<u8> {
        codec::canonical_digest(b"willchain/tx/v1", &SignDoc { chain_id, tx: self })
            .expect("tx serializes")
            .to_vec()
    }

    pub fn sign(self, kp: &KeyPair, chain_id: &str, nonces: &mut NonceSource) -> SignedTx {
        let signature = schnorr::sign(kp, &self.sign_bytes(chain_id), nonces);
        SignedTx {
            tx: self,
            public_key: kp.public,
            signature,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedTx {
    pub tx: Tx,
    pub public_key: GroupElement,
    pub signature: SchnorrSignature,
}

impl SignedTx {
    pub fn authenticate(&self, chain_id: &str) -> Result<(), ChainError> {
        if Address::from_public_key(&self.public_key) != self.tx.sender {
            return Err(ChainError::Auth("public key does not match sender".into()));
        }
        if !schnorr::verify::<Ristretto>(
            &self.public_key,
            &self.tx.sign_bytes(chain_id),
            &self.signature,
        ) {
            return Err(ChainError::Auth("bad signature".into()));
        }
        Ok(())
    }
}

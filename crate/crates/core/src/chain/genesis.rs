use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::address::Address;
use crate::chain::{ChainError, NATIVE_DENOM};
use crate::crypto::{DlogProof, GroupElement};
use crate::vault::{DEFAULT_CHUNK_SIZE, MAX_CHUNK_SIZE};
use crate::will::DEFAULT_CLAIM_WINDOW;

fn native() -> String {
    NATIVE_DENOM.to_string()
}
fn penalty() -> u64 {
    1_000_000
}
fn checkin_period() -> u64 {
    100
}
fn claim_window() -> u64 {
    DEFAULT_CLAIM_WINDOW
}
fn chunk_size() -> usize {
    DEFAULT_CHUNK_SIZE
}
fn max_chunk_size() -> usize {
    MAX_CHUNK_SIZE
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainParams {
    #[serde(default = "native")]
    pub native_denom: String,
    /// Burned for every valid claim submitted before expiration.
    #[serde(default = "penalty")]
    pub penalty_amount: u64,
    /// A check-in pushes expiration to at least `height + checkin_period`.
    #[serde(default = "checkin_period")]
    pub checkin_period: u64,
    #[serde(default = "claim_window")]
    pub claim_window: u64,
    /// Flat fee per transaction, paid into the fee pool.
    #[serde(default)]
    pub tx_fee: u64,
    #[serde(default = "chunk_size")]
    pub chunk_size: usize,
    #[serde(default = "max_chunk_size")]
    pub max_chunk_size: usize,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams {
            native_denom: native(),
            penalty_amount: penalty(),
            checkin_period: checkin_period(),
            claim_window: claim_window(),
            tx_fee: 0,
            chunk_size: chunk_size(),
            max_chunk_size: max_chunk_size(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenesisAccount {
    pub address: Address,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub public_key: Option<GroupElement>,
    #[serde(default)]
    pub balances: BTreeMap<String, u64>,
    /// Pays this account's transaction fees.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sponsor: Option<Address>,
    /// Registers the key for signature aggregation at genesis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub possession_proof: Option<DlogProof>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Genesis {
    pub chain_id: String,
    #[serde(default)]
    pub params: ChainParams,
    pub accounts: Vec<GenesisAccount>,
    /// Declared native supply; checked against the account balances.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supply: Option<u64>,
}

impl Genesis {
    pub fn native_supply(&self) -> Result<u64, ChainError> {
        self.accounts
            .iter()
            .map(|a| {
                a.balances
                    .get(&self.params.native_denom)
                    .copied()
                    .unwrap_or(0)
            })
            .try_fold(0u64, |acc, b| acc.checked_add(b))
            .ok_or_else(|| ChainError::Validation("genesis supply overflows".into()))
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        if self.chain_id.is_empty() {
            return Err(ChainError::Validation("chain id is empty".into()));
        }
        let supply = self.native_supply()?;
        if let Some(declared) = self.supply {
            if declared != supply {
                return Err(ChainError::Validation(format!(
                    "declared supply {declared} differs from account total {supply}"
                )));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for a in &self.accounts {
            if !seen.insert(a.address) {
                return Err(ChainError::Validation(format!(
                    "duplicate account {}",
                    a.address
                )));
            }
            if let Some(pk) = &a.public_key {
                if Address::from_public_key(pk) != a.address {
                    return Err(ChainError::Validation(format!(
                        "public key does not match {}",
                        a.address
                    )));
                }
            }
            if a.possession_proof.is_some() && a.public_key.is_none() {
                return Err(ChainError::Validation(format!(
                    "possession proof without key for {}",
                    a.address
                )));
            }
        }
        if self.params.chunk_size == 0 || self.params.chunk_size > self.params.max_chunk_size {
            return Err(ChainError::Validation("chunk size out of range".into()));
        }
        Ok(())
    }
}

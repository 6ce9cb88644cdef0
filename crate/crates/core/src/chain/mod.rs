//! The home chain: accounts, transactions, block processing and the will
//! module's side of interchain handshakes.

mod deeds;
pub mod genesis;
mod ibc;
mod runtime;
pub mod state;
pub mod tx;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::address::Address;
use crate::crypto::CryptoError;
use crate::interchain::InterchainError;
use crate::vault::VaultError;
use crate::will::{Did, WillError};

pub use genesis::{ChainParams, Genesis, GenesisAccount};
pub use state::{Account, Approval, ChainState, Handshake, HandshakeKind};
pub use tx::{SignedTx, Tx, TxBody, WillDefinition};

pub const NATIVE_DENOM: &str = "uwill";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("bad sequence: expected {expected}, got {got}")]
    Sequence { expected: u64, got: u64 },
    #[error("unknown account {0}")]
    UnknownAccount(Address),
    #[error("insufficient funds: {account} has {available} {denom}, needs {needed}")]
    InsufficientFunds {
        account: String,
        denom: String,
        available: u64,
        needed: u64,
    },
    #[error("unknown will {0}")]
    UnknownWill(Did),
    #[error("unauthorized")]
    Unauthorized,
    #[error("too late: will {0} has already expired")]
    TooLate(Did),
    #[error("premature reveal: {0}")]
    PrematureReveal(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error(transparent)]
    Will(#[from] WillError),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error(transparent)]
    Vault(#[from] VaultError),
    #[error(transparent)]
    Interchain(#[from] InterchainError),
}

/// One entry of a chain's append-only event log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub height: u64,
    pub kind: String,
    pub attributes: BTreeMap<String, String>,
}

impl Event {
    pub fn new(height: u64, kind: &str, attributes: &[(&str, String)]) -> Self {
        Event {
            height,
            kind: kind.to_string(),
            attributes: attributes
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        }
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attributes.get(key).map(String::as_str)
    }
}

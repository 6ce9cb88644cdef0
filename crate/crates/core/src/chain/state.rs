use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::address::Address;
use crate::chain::{ChainError, ChainParams, Event, Genesis};
use crate::codec;
use crate::crypto::{GroupElement, KeyRegistry};
use crate::hash::Digest32;
use crate::interchain::{PacketStore, Path, WILL_PORT};
use crate::vault::Vault;
use crate::will::{Did, ShareLedger, SoulboundToken, Will};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Account {
    pub address: Address,
    pub public_key: Option<GroupElement>,
    pub balances: BTreeMap<String, u64>,
    pub sponsor: Option<Address>,
    pub sequence: u64,
}

impl Account {
    pub fn new(address: Address) -> Self {
        Account {
            address,
            public_key: None,
            balances: BTreeMap::new(),
            sponsor: None,
            sequence: 0,
        }
    }

    pub fn balance(&self, denom: &str) -> u64 {
        self.balances.get(denom).copied().unwrap_or(0)
    }
}

/// A creator's approval of a contract on some chain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Approval {
    pub creator: Address,
    pub chain_id: String,
    pub contract: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HandshakeKind {
    /// An execution component fired at expiration.
    Execution,
    /// A beneficiary claim whose evidence already verified; `bond` is held
    /// until the verdict.
    Claim { claimant: Address, bond: u64 },
}

/// An interchain handshake awaiting its acknowledgement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Handshake {
    pub did: Did,
    pub component: String,
    pub kind: HandshakeKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub chain_id: String,
    pub height: u64,
    pub params: ChainParams,
    pub genesis_supply: u64,
    pub accounts: BTreeMap<Address, Account>,
    pub wills: BTreeMap<Did, Will>,
    pub tokens: BTreeMap<Did, SoulboundToken>,
    pub will_nonces: BTreeMap<Address, u64>,
    /// Wills due at each height. Every active will appears exactly once.
    pub expiration_index: BTreeMap<u64, BTreeSet<Did>>,
    /// Claim windows closing at each height.
    pub window_index: BTreeMap<u64, BTreeSet<(Did, String)>>,
    /// Funds each will holds for its transfers, per denomination.
    pub escrow: BTreeMap<Did, BTreeMap<String, u64>>,
    pub share_ledgers: BTreeMap<Did, ShareLedger>,
    pub approvals: BTreeSet<Approval>,
    pub key_registry: KeyRegistry,
    pub channels: BTreeMap<String, Path>,
    pub packets: PacketStore,
    /// Keyed by `channel/sequence` of the init packet.
    pub handshakes: BTreeMap<String, Handshake>,
    pub fee_pool: u64,
    pub bonded: u64,
    pub burned: u64,
    pub events: Vec<Event>,
    pub vault: Vault,
}

impl ChainState {
    pub fn from_genesis(genesis: &Genesis) -> Result<Self, ChainError> {
        genesis.validate()?;
        let mut state = ChainState {
            chain_id: genesis.chain_id.clone(),
            height: 0,
            params: genesis.params.clone(),
            genesis_supply: genesis.native_supply()?,
            accounts: BTreeMap::new(),
            wills: BTreeMap::new(),
            tokens: BTreeMap::new(),
            will_nonces: BTreeMap::new(),
            expiration_index: BTreeMap::new(),
            window_index: BTreeMap::new(),
            escrow: BTreeMap::new(),
            share_ledgers: BTreeMap::new(),
            approvals: BTreeSet::new(),
            key_registry: KeyRegistry::new(),
            channels: BTreeMap::new(),
            packets: PacketStore::default(),
            handshakes: BTreeMap::new(),
            fee_pool: 0,
            bonded: 0,
            burned: 0,
            events: Vec::new(),
            vault: Vault::new(
                genesis.params.max_chunk_size,
                crate::vault::CELLS_PER_CONTRACT,
                usize::MAX,
            ),
        };
        for a in &genesis.accounts {
            if let (Some(pk), Some(pop)) = (&a.public_key, &a.possession_proof) {
                state.key_registry.register(pk, pop)?;
            }
            state.accounts.insert(
                a.address,
                Account {
                    address: a.address,
                    public_key: a.public_key,
                    balances: a.balances.clone(),
                    sponsor: a.sponsor,
                    sequence: 0,
                },
            );
        }
        Ok(state)
    }

    /// Opens a channel from the will module. The will module must be
    /// exactly one endpoint.
    pub fn open_channel(
        &mut self,
        channel: &str,
        port: &str,
        counterparty_chain: &str,
        counterparty_port: &str,
    ) -> Result<(), ChainError> {
        let path = Path {
            source_chain: self.chain_id.clone(),
            source_port: port.to_string(),
            destination_chain: counterparty_chain.to_string(),
            destination_port: counterparty_port.to_string(),
            channel: channel.to_string(),
        };
        if !path.touches_will_module() || port != WILL_PORT {
            return Err(
                crate::interchain::InterchainError::PathConstraint(channel.to_string()).into(),
            );
        }
        if self.channels.contains_key(channel) {
            return Err(ChainError::Validation(format!(
                "channel {channel} already open"
            )));
        }
        self.channels.insert(channel.to_string(), path);
        Ok(())
    }

    pub fn account(&self, addr: &Address) -> Option<&Account> {
        self.accounts.get(addr)
    }

    pub fn balance(&self, addr: &Address, denom: &str) -> u64 {
        self.accounts.get(addr).map_or(0, |a| a.balance(denom))
    }

    pub fn native_balance(&self, addr: &Address) -> u64 {
        self.balance(addr, &self.params.native_denom)
    }

    pub fn will(&self, did: &Did) -> Result<&Will, ChainError> {
        self.wills
            .get(did)
            .ok_or_else(|| ChainError::UnknownWill(did.clone()))
    }

    pub fn escrow_of(&self, did: &Did, denom: &str) -> u64 {
        self.escrow
            .get(did)
            .and_then(|m| m.get(denom))
            .copied()
            .unwrap_or(0)
    }

    /// Native funds across balances, escrow, share escrow, fees, bonds and
    /// burns. Equals the genesis supply in every reachable state.
    pub fn native_accounted(&self) -> u128 {
        let denom = &self.params.native_denom;
        let balances: u128 = self
            .accounts
            .values()
            .map(|a| a.balance(denom) as u128)
            .sum();
        let escrow: u128 = self
            .escrow
            .values()
            .map(|m| m.get(denom).copied().unwrap_or(0) as u128)
            .sum();
        let shares: u128 = self.share_ledgers.values().map(|l| l.escrow as u128).sum();
        balances
            + escrow
            + shares
            + self.fee_pool as u128
            + self.bonded as u128
            + self.burned as u128
    }

    pub fn conserves_supply(&self) -> bool {
        self.native_accounted() == self.genesis_supply as u128
    }

    /// Digest of the canonical encoding of the whole state.
    pub fn state_hash(&self) -> Digest32 {
        codec::canonical_digest(b"willchain/state/v1", self).expect("state serializes")
    }

    pub(crate) fn emit(&mut self, kind: &str, attributes: &[(&str, String)]) {
        log::debug!(target: "willchain::event", "{} h{} {kind} {attributes:?}", self.chain_id, self.height);
        self.events.push(Event::new(self.height, kind, attributes));
    }

    pub(crate) fn credit(&mut self, addr: &Address, denom: &str, amount: u64) {
        let acct = self
            .accounts
            .entry(*addr)
            .or_insert_with(|| Account::new(*addr));
        *acct.balances.entry(denom.to_string()).or_insert(0) += amount;
    }

    pub(crate) fn debit(
        &mut self,
        addr: &Address,
        denom: &str,
        amount: u64,
    ) -> Result<(), ChainError> {
        let available = self.balance(addr, denom);
        if available < amount {
            return Err(ChainError::InsufficientFunds {
                account: addr.to_string(),
                denom: denom.to_string(),
                available,
                needed: amount,
            });
        }
        if amount > 0 {
            let acct = self
                .accounts
                .get_mut(addr)
                .expect("nonzero balance implies account");
            *acct.balances.get_mut(denom).expect("nonzero balance") -= amount;
        }
        Ok(())
    }

    pub(crate) fn debit_escrow(
        &mut self,
        did: &Did,
        denom: &str,
        amount: u64,
    ) -> Result<(), ChainError> {
        let available = self.escrow_of(did, denom);
        if available < amount {
            return Err(ChainError::InsufficientFunds {
                account: format!("escrow:{did}"),
                denom: denom.to_string(),
                available,
                needed: amount,
            });
        }
        if amount > 0 {
            *self
                .escrow
                .get_mut(did)
                .and_then(|m| m.get_mut(denom))
                .expect("nonzero escrow") -= amount;
        }
        Ok(())
    }

    pub(crate) fn is_approved(&self, creator: &Address, chain_id: &str, contract: &str) -> bool {
        self.approvals.contains(&Approval {
            creator: *creator,
            chain_id: chain_id.to_string(),
            contract: contract.to_string(),
        })
    }

    /// Event log as line-delimited canonical records.
    pub fn export_events(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&codec::to_canonical(e).expect("event serializes"));
            out.push('\n');
        }
        out
    }

    /// Rebuilds caches not part of the canonical encoding after loading.
    pub fn restore(&mut self) {
        self.vault.restore_cursor();
    }
}

//! A destination chain and its entrypoint contract.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::address::Address;
use crate::chain::Event;
use crate::codec;
use crate::hash::Digest32;
use crate::interchain::packet::{
    decapsulate, Packet, PacketData, Path, Phase, Verdict, ENTRYPOINT_PORT, WILL_PORT,
};
use crate::interchain::store::PacketStore;
use crate::interchain::InterchainError;
use crate::will::{ComponentOutput, Did};

/// An init packet the contract has acknowledged and awaits a verdict for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingInit {
    pub did: Did,
    pub component: String,
    pub creator: Address,
    pub claimant: Option<Address>,
    pub logic: ComponentOutput,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractCallRecord {
    pub did: Did,
    pub component: String,
    pub contract_address: String,
    pub payload: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntrypointContract {
    pub address: String,
    /// Creators who approved this contract to act for their wills.
    pub approved_by: BTreeSet<Address>,
    pub escrow: BTreeMap<String, u64>,
    pub executed_wills: BTreeSet<Did>,
    pub pending: BTreeMap<String, PendingInit>,
    /// `did/component` pairs whose logic ran here.
    pub released: BTreeSet<String>,
    pub calls: Vec<ContractCallRecord>,
}

impl EntrypointContract {
    pub fn new(address: &str, escrow: BTreeMap<String, u64>) -> Self {
        EntrypointContract {
            address: address.to_string(),
            approved_by: BTreeSet::new(),
            escrow,
            executed_wills: BTreeSet::new(),
            pending: BTreeMap::new(),
            released: BTreeSet::new(),
            calls: Vec::new(),
        }
    }

    fn escrow_covers(&self, logic: &ComponentOutput) -> bool {
        match logic {
            ComponentOutput::IbcSend { amount, denom, .. } => {
                self.escrow.get(denom).copied().unwrap_or(0) >= *amount
            }
            _ => true,
        }
    }
}

fn release_key(did: &Did, component: &str) -> String {
    format!("{did}/{component}")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DestinationChain {
    pub chain_id: String,
    pub height: u64,
    pub contract: EntrypointContract,
    /// Balances on this chain keyed by address string, then denomination.
    pub balances: BTreeMap<String, BTreeMap<String, u64>>,
    pub channels: BTreeMap<String, Path>,
    pub packets: PacketStore,
    pub events: Vec<Event>,
}

impl DestinationChain {
    pub fn new(chain_id: &str, contract: EntrypointContract) -> Self {
        DestinationChain {
            chain_id: chain_id.to_string(),
            height: 0,
            contract,
            balances: BTreeMap::new(),
            channels: BTreeMap::new(),
            packets: PacketStore::default(),
            events: Vec::new(),
        }
    }

    pub fn open_channel(&mut self, channel: &str, home_chain: &str) -> Result<(), InterchainError> {
        let path = Path {
            source_chain: self.chain_id.clone(),
            source_port: ENTRYPOINT_PORT.to_string(),
            destination_chain: home_chain.to_string(),
            destination_port: WILL_PORT.to_string(),
            channel: channel.to_string(),
        };
        if !path.touches_will_module() {
            return Err(InterchainError::PathConstraint(channel.to_string()));
        }
        self.channels.insert(channel.to_string(), path);
        Ok(())
    }

    pub fn balance(&self, addr: &str, denom: &str) -> u64 {
        self.balances
            .get(addr)
            .and_then(|m| m.get(denom))
            .copied()
            .unwrap_or(0)
    }

    /// Escrow plus balances of `denom`; constant across packet handling.
    pub fn total(&self, denom: &str) -> u128 {
        let held: u128 = self
            .balances
            .values()
            .map(|m| m.get(denom).copied().unwrap_or(0) as u128)
            .sum();
        held + self.contract.escrow.get(denom).copied().unwrap_or(0) as u128
    }

    pub fn state_hash(&self) -> Digest32 {
        codec::canonical_digest(b"willchain/state/v1", self).expect("state serializes")
    }

    fn emit(&mut self, kind: &str, attributes: &[(&str, String)]) {
        self.events.push(Event::new(self.height, kind, attributes));
    }

    pub fn receive_packet(&mut self, packet: &Packet) -> Result<(), InterchainError> {
        let key = packet.key();
        let path = &packet.path;
        let own = self.channels.get(&path.channel);
        if path.destination_chain != self.chain_id
            || path.destination_port != ENTRYPOINT_PORT
            || own.is_none_or(|p| p.reversed() != *path)
        {
            return Err(InterchainError::Misrouted(key));
        }
        let pending_key = format!("{}/{}", path.channel, packet.sequence);
        match PacketData::from_bytes(&packet.payload)? {
            PacketData::Init {
                did,
                component,
                creator,
                claimant,
                logic,
            } if packet.phase == Phase::Init => {
                let logic = decapsulate(&logic)?;
                self.packets.receive(packet)?;
                if claimant.is_none() {
                    self.contract.executed_wills.insert(did.clone());
                }
                let ack = PacketData::Ack {
                    creator_approved: self.contract.approved_by.contains(&creator),
                    escrow_sufficient: self.contract.escrow_covers(&logic),
                    already_released: self
                        .contract
                        .released
                        .contains(&release_key(&did, &component)),
                };
                self.emit(
                    "init_received",
                    &[
                        ("key", key),
                        ("did", did.to_string()),
                        ("component", component.clone()),
                    ],
                );
                self.contract.pending.insert(
                    pending_key,
                    PendingInit {
                        did,
                        component,
                        creator,
                        claimant,
                        logic,
                    },
                );
                let back = self.channels[&path.channel].clone();
                self.packets
                    .send(back, packet.sequence, Phase::Ack, ack.to_bytes());
                Ok(())
            }
            PacketData::Confirm { verdict } if packet.phase == Phase::Confirm => {
                if self.packets.has_receipt(&key) {
                    return Err(InterchainError::ReplayRejected(key));
                }
                if !self.contract.pending.contains_key(&pending_key) {
                    return Err(InterchainError::UnknownHandshake(pending_key));
                }
                self.packets.receive(packet)?;
                let init = self
                    .contract
                    .pending
                    .remove(&pending_key)
                    .expect("checked above");
                self.settle(init, verdict);
                Ok(())
            }
            _ => Err(InterchainError::UnexpectedPhase(packet.phase.to_string())),
        }
    }

    /// Applies the will module's verdict. Logic runs at most once per
    /// component.
    fn settle(&mut self, init: PendingInit, verdict: Verdict) {
        let rk = release_key(&init.did, &init.component);
        let attrs = |outcome: &str| {
            vec![
                ("did", init.did.to_string()),
                ("component", init.component.clone()),
                ("outcome", outcome.to_string()),
            ]
        };
        if let Verdict::Ineligible(reason) = &verdict {
            let mut a = attrs("rejected");
            a.push(("reason", reason.clone()));
            self.emit("entrypoint", &a);
            return;
        }
        if verdict == Verdict::Early {
            self.emit("entrypoint", &attrs("rejected_early"));
            return;
        }
        if self.contract.released.contains(&rk) || !self.contract.escrow_covers(&init.logic) {
            self.emit("entrypoint", &attrs("refused"));
            return;
        }
        match &init.logic {
            ComponentOutput::IbcSend {
                address,
                amount,
                denom,
                ..
            } => {
                *self.contract.escrow.get_mut(denom).expect("escrow covers") -= amount;
                *self
                    .balances
                    .entry(address.clone())
                    .or_default()
                    .entry(denom.clone())
                    .or_insert(0) += amount;
            }
            ComponentOutput::ContractCall {
                contract_address,
                payload,
            } => self.contract.calls.push(ContractCallRecord {
                did: init.did.clone(),
                component: init.component.clone(),
                contract_address: contract_address.clone(),
                payload: payload.clone(),
            }),
            _ => unreachable!("decapsulate admits only interchain logic"),
        }
        self.contract.released.insert(rk);
        self.emit("entrypoint", &attrs("released"));
    }
}

//! The home chain, its destinations and the relayers between them.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::address::Address;
use crate::chain::{ChainError, ChainState, Genesis, SignedTx, TxBody};
use crate::codec;
use crate::hash::{hash32, Digest32};
use crate::interchain::destination::{DestinationChain, EntrypointContract};
use crate::interchain::packet::{Packet, Path, Phase, Verdict, ENTRYPOINT_PORT, WILL_PORT};
use crate::interchain::relayer::{Proof, Relayer};
use crate::interchain::store::PacketStore;
use crate::interchain::InterchainError;
use crate::will::Emitted;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DestinationConfig {
    pub chain_id: String,
    pub entrypoint: String,
    #[serde(default)]
    pub escrow: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelLink {
    pub channel: String,
    pub destination_chain: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    #[serde(default)]
    pub destinations: Vec<DestinationConfig>,
    #[serde(default)]
    pub channels: Vec<ChannelLink>,
    #[serde(default)]
    pub relayers: Vec<Relayer>,
    #[serde(default)]
    pub seed: u64,
}

/// One delivery attempt.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step: u64,
    pub relayer: String,
    pub path: Path,
    pub sequence: u64,
    pub phase: Phase,
    pub commitment: String,
    pub outcome: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Network {
    pub home: ChainState,
    pub destinations: BTreeMap<String, DestinationChain>,
    pub relayers: Vec<Relayer>,
    pub seed: u64,
    pub steps: u64,
    pub trace: Vec<TraceEntry>,
}

impl Network {
    pub fn new(genesis: &Genesis, topology: &Topology) -> Result<Self, ChainError> {
        let mut home = ChainState::from_genesis(genesis)?;
        let mut destinations = BTreeMap::new();
        for d in &topology.destinations {
            if d.chain_id == home.chain_id || destinations.contains_key(&d.chain_id) {
                return Err(ChainError::Validation(format!(
                    "duplicate chain {}",
                    d.chain_id
                )));
            }
            destinations.insert(
                d.chain_id.clone(),
                DestinationChain::new(
                    &d.chain_id,
                    EntrypointContract::new(&d.entrypoint, d.escrow.clone()),
                ),
            );
        }
        for link in &topology.channels {
            let dest = destinations
                .get_mut(&link.destination_chain)
                .ok_or_else(|| InterchainError::UnknownChain(link.destination_chain.clone()))?;
            home.open_channel(
                &link.channel,
                WILL_PORT,
                &link.destination_chain,
                ENTRYPOINT_PORT,
            )?;
            dest.open_channel(&link.channel, &home.chain_id)?;
        }
        Ok(Network {
            home,
            destinations,
            relayers: topology.relayers.clone(),
            seed: topology.seed,
            steps: 0,
            trace: Vec::new(),
        })
    }

    /// Applies a home-chain transaction. An approval also registers the
    /// creator with the contract it names.
    pub fn apply_tx(&mut self, stx: &SignedTx) -> Result<(), ChainError> {
        self.home.apply_tx(stx)?;
        if let TxBody::ApproveContract { chain_id, address } = &stx.tx.body {
            if let Some(dest) = self.destinations.get_mut(chain_id) {
                if dest.contract.address == *address {
                    dest.contract.approved_by.insert(stx.tx.sender);
                }
            }
        }
        Ok(())
    }

    pub fn advance(&mut self, blocks: u64) -> Vec<Emitted> {
        for d in self.destinations.values_mut() {
            d.height += blocks;
        }
        self.home.advance(blocks)
    }

    fn store(&self, chain: &str) -> Option<&PacketStore> {
        if chain == self.home.chain_id {
            Some(&self.home.packets)
        } else {
            self.destinations.get(chain).map(|d| &d.packets)
        }
    }

    fn height_of(&self, chain: &str) -> u64 {
        if chain == self.home.chain_id {
            self.home.height
        } else {
            self.destinations.get(chain).map_or(0, |d| d.height)
        }
    }

    fn step_rng(&self) -> ChaCha20Rng {
        let seed = hash32(
            b"willchain/relay/v1",
            &[&self.seed.to_le_bytes(), &self.steps.to_le_bytes()],
        );
        ChaCha20Rng::from_seed(seed)
    }

    fn scan(&self, relayer: &Relayer) -> Vec<Packet> {
        let mut out = Vec::new();
        let chains = std::iter::once(&self.home.packets)
            .chain(self.destinations.values().map(|d| &d.packets));
        for source in chains {
            for p in &source.outbox {
                if let Some(target) = self.store(&p.path.destination_chain) {
                    if relayer.serves(&p.path.channel) && !target.has_receipt(&p.key()) {
                        out.push(p.clone());
                    }
                }
            }
        }
        out
    }

    /// One round: every relayer scans, then each delivers its list in a
    /// shuffled order. Relayer order is shuffled too. Lists are scanned up
    /// front, so packets seen by several relayers are delivered more than
    /// once and the duplicates bounce as replays. Returns the number of
    /// packets accepted.
    pub fn relay_step(&mut self) -> usize {
        let mut rng = self.step_rng();
        let mut order: Vec<usize> = (0..self.relayers.len()).collect();
        order.shuffle(&mut rng);
        let plans: Vec<(usize, Vec<Packet>)> = order
            .iter()
            .map(|&i| (i, self.scan(&self.relayers[i])))
            .collect();
        let mut accepted = 0;
        for (i, mut list) in plans {
            list.shuffle(&mut rng);
            for p in list {
                if self.deliver(i, p) {
                    accepted += 1;
                }
            }
        }
        self.steps += 1;
        accepted
    }

    /// Runs relay steps until nothing is accepted or `max_steps` is hit.
    pub fn relay_until_quiet(&mut self, max_steps: u64) -> u64 {
        let mut n = 0;
        while n < max_steps {
            n += 1;
            if self.relay_step() == 0 {
                break;
            }
        }
        n
    }

    /// Relayer `relayer` hands `packet` to its destination chain. Returns
    /// whether the chain accepted it.
    pub fn deliver(&mut self, relayer: usize, packet: Packet) -> bool {
        let relayer_id = self
            .relayers
            .get(relayer)
            .map_or_else(|| format!("#{relayer}"), |r| r.id.clone());
        let source_ok = self
            .store(&packet.path.source_chain)
            .zip(self.relayers.get(relayer))
            .is_some_and(|(s, r)| r.decide(&packet, s));
        let outcome = if !source_ok {
            Err("dropped: no matching commitment at source".to_string())
        } else {
            let proof = Proof {
                height: self.height_of(&packet.path.source_chain),
                commitment: packet.commitment,
            };
            self.submit(&packet, &proof)
        };
        let accepted = outcome.is_ok();
        self.trace.push(TraceEntry {
            step: self.steps,
            relayer: relayer_id,
            path: packet.path.clone(),
            sequence: packet.sequence,
            phase: packet.phase,
            commitment: hex::encode(packet.commitment),
            outcome: outcome.unwrap_or_else(|e| e),
        });
        accepted
    }

    fn submit(&mut self, packet: &Packet, proof: &Proof) -> Result<String, String> {
        if !proof.verifies(packet) {
            return Err("rejected: proof does not match packet".into());
        }
        let target = &packet.path.destination_chain;
        if *target == self.home.chain_id {
            return match self.home.receive_packet(packet) {
                Ok(Verdict::Eligible) => Ok("verdict: eligible".into()),
                Ok(Verdict::Early) => Ok("verdict: early".into()),
                Ok(Verdict::Ineligible(r)) => Ok(format!("verdict: ineligible ({r})")),
                Err(e) => Err(format!("rejected: {e}")),
            };
        }
        match self.destinations.get_mut(target) {
            Some(d) => d
                .receive_packet(packet)
                .map(|()| "accepted".into())
                .map_err(|e| format!("rejected: {e}")),
            None => Err(format!("rejected: unknown chain {target}")),
        }
    }

    pub fn chain_hashes(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        out.insert(
            self.home.chain_id.clone(),
            hex::encode(self.home.state_hash()),
        );
        for (id, d) in &self.destinations {
            out.insert(id.clone(), hex::encode(d.state_hash()));
        }
        out
    }

    /// Digest over every chain and the relay trace.
    pub fn network_hash(&self) -> Digest32 {
        codec::canonical_digest(b"willchain/network/v1", self).expect("network serializes")
    }

    pub fn destination(&self, chain_id: &str) -> Option<&DestinationChain> {
        self.destinations.get(chain_id)
    }

    pub fn restore(&mut self) {
        self.home.restore();
    }

    pub fn approvals_of(&self, creator: &Address) -> Vec<(String, String)> {
        self.home
            .approvals
            .iter()
            .filter(|a| a.creator == *creator)
            .map(|a| (a.chain_id.clone(), a.contract.clone()))
            .collect()
    }
}

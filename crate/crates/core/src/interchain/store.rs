use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::interchain::packet::{Packet, Path, Phase};
use crate::interchain::InterchainError;

/// Per-chain packet bookkeeping: sent packets with their commitments, and
/// receipts of delivered ones.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketStore {
    pub outbox: Vec<Packet>,
    /// Commitment (hex) per packet key, as written by the sender.
    pub commitments: BTreeMap<String, String>,
    pub receipts: BTreeSet<String>,
    pub next_sequence: BTreeMap<String, u64>,
}

impl PacketStore {
    pub fn next_sequence(&mut self, channel: &str) -> u64 {
        let seq = self.next_sequence.entry(channel.to_string()).or_insert(1);
        let out = *seq;
        *seq += 1;
        out
    }

    pub fn send(&mut self, path: Path, sequence: u64, phase: Phase, payload: Vec<u8>) -> &Packet {
        let packet = Packet::new(path, sequence, phase, payload);
        self.commitments
            .insert(packet.key(), hex::encode(packet.commitment));
        self.outbox.push(packet);
        self.outbox.last().expect("just pushed")
    }

    pub fn has_commitment(&self, key: &str, commitment: &[u8; 32]) -> bool {
        self.commitments
            .get(key)
            .is_some_and(|c| *c == hex::encode(commitment))
    }

    /// Writes the receipt for `packet`; a second delivery is a replay.
    pub fn receive(&mut self, packet: &Packet) -> Result<(), InterchainError> {
        let key = packet.key();
        if !self.receipts.insert(key.clone()) {
            return Err(InterchainError::ReplayRejected(key));
        }
        Ok(())
    }

    pub fn has_receipt(&self, key: &str) -> bool {
        self.receipts.contains(key)
    }
}

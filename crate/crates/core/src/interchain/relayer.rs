//! Relayers: untrusted processes that move packets between chains.
//!
//! A relayer can drop, delay, duplicate or reorder packets. It cannot get
//! a packet accepted unless the source chain holds a matching commitment.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::hash::Digest32;
use crate::interchain::packet::Packet;
use crate::interchain::store::PacketStore;

/// Evidence that the source committed to a packet at some height.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proof {
    pub height: u64,
    #[serde(with = "crate::codec::hex32")]
    pub commitment: Digest32,
}

impl Proof {
    pub fn verifies(&self, packet: &Packet) -> bool {
        self.commitment == packet.recompute_commitment()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relayer {
    pub id: String,
    /// Channels served; empty means all.
    #[serde(default)]
    pub channels: BTreeSet<String>,
}

impl Relayer {
    pub fn serves(&self, channel: &str) -> bool {
        self.channels.is_empty() || self.channels.contains(channel)
    }

    /// Packets in `source` on served channels that `target` has no receipt
    /// for yet.
    pub fn scan(&self, source: &PacketStore, target: &PacketStore) -> Vec<Packet> {
        source
            .outbox
            .iter()
            .filter(|p| self.serves(&p.path.channel) && !target.has_receipt(&p.key()))
            .cloned()
            .collect()
    }

    /// Forward only packets whose commitment is intact and present in the
    /// source store.
    pub fn decide(&self, packet: &Packet, source: &PacketStore) -> bool {
        packet.recompute_commitment() == packet.commitment
            && source.has_commitment(&packet.key(), &packet.commitment)
    }
}

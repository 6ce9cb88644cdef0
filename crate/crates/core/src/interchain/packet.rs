//! Packets, paths and the messages they carry.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::address::Address;
use crate::codec;
use crate::hash::{hash32, Digest32};
use crate::interchain::InterchainError;
use crate::will::{ComponentOutput, Did};

/// Port the will module binds on the home chain.
pub const WILL_PORT: &str = "will";
/// Port entrypoint contracts bind on destination chains.
pub const ENTRYPOINT_PORT: &str = "entrypoint";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Path {
    pub source_chain: String,
    pub source_port: String,
    pub destination_chain: String,
    pub destination_port: String,
    pub channel: String,
}

impl Path {
    pub fn reversed(&self) -> Path {
        Path {
            source_chain: self.destination_chain.clone(),
            source_port: self.destination_port.clone(),
            destination_chain: self.source_chain.clone(),
            destination_port: self.source_port.clone(),
            channel: self.channel.clone(),
        }
    }

    /// Exactly one end must be the will module.
    pub fn touches_will_module(&self) -> bool {
        (self.source_port == WILL_PORT) ^ (self.destination_port == WILL_PORT)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Init,
    Ack,
    Confirm,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Init => "init",
            Phase::Ack => "ack",
            Phase::Confirm => "confirm",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packet {
    pub path: Path,
    pub sequence: u64,
    pub phase: Phase,
    #[serde(with = "crate::codec::hex_bytes")]
    pub payload: Vec<u8>,
    #[serde(with = "crate::codec::hex32")]
    pub commitment: Digest32,
}

/// `H(path ∥ sequence ∥ payload)`.
pub fn packet_commitment(path: &Path, sequence: u64, payload: &[u8]) -> Digest32 {
    let path_bytes = codec::to_canonical(path).expect("path serializes");
    hash32(
        b"willchain/packet/v1",
        &[path_bytes.as_bytes(), &sequence.to_le_bytes(), payload],
    )
}

impl Packet {
    pub fn new(path: Path, sequence: u64, phase: Phase, payload: Vec<u8>) -> Self {
        let commitment = packet_commitment(&path, sequence, &payload);
        Packet {
            path,
            sequence,
            phase,
            payload,
            commitment,
        }
    }

    pub fn recompute_commitment(&self) -> Digest32 {
        packet_commitment(&self.path, self.sequence, &self.payload)
    }

    /// Key under which the source stores the commitment and the
    /// destination stores its receipt.
    pub fn key(&self) -> String {
        packet_key(&self.path.channel, self.phase, self.sequence)
    }
}

pub fn packet_key(channel: &str, phase: Phase, sequence: u64) -> String {
    format!("{channel}/{phase}/{sequence:020}")
}

/// Encapsulates interchain component logic into packet bytes.
pub fn encapsulate(logic: &ComponentOutput) -> Result<Vec<u8>, InterchainError> {
    if !logic.is_interchain() {
        return Err(InterchainError::NotEncapsulable);
    }
    Ok(codec::to_canonical(logic)
        .expect("outputs serialize")
        .into_bytes())
}

pub fn decapsulate(bytes: &[u8]) -> Result<ComponentOutput, InterchainError> {
    let text = std::str::from_utf8(bytes).map_err(|_| InterchainError::MalformedPayload)?;
    let out: ComponentOutput =
        codec::from_text(text).map_err(|_| InterchainError::MalformedPayload)?;
    if !out.is_interchain() {
        return Err(InterchainError::NotEncapsulable);
    }
    Ok(out)
}

/// Why the will module does or does not let a destination act.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum Verdict {
    Eligible,
    /// Valid claim before expiration: rejected and penalized.
    Early,
    Ineligible(String),
}

/// Packet payloads, one per phase.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "msg", rename_all = "snake_case")]
pub enum PacketData {
    /// Will module to entrypoint: run this logic for this will.
    Init {
        did: Did,
        component: String,
        creator: Address,
        /// Set for beneficiary claims, empty for execution at expiration.
        claimant: Option<Address>,
        #[serde(with = "crate::codec::hex_bytes")]
        logic: Vec<u8>,
    },
    /// Entrypoint to will module: the contract's side of the eligibility
    /// query.
    Ack {
        creator_approved: bool,
        escrow_sufficient: bool,
        already_released: bool,
    },
    /// Will module to entrypoint: the final verdict.
    Confirm { verdict: Verdict },
}

impl PacketData {
    pub fn to_bytes(&self) -> Vec<u8> {
        codec::to_canonical(self)
            .expect("packet data serializes")
            .into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, InterchainError> {
        let text = std::str::from_utf8(bytes).map_err(|_| InterchainError::MalformedPayload)?;
        codec::from_text(text).map_err(|_| InterchainError::MalformedPayload)
    }
}

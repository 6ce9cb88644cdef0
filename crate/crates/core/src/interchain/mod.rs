//! Interchain execution: packets between the will module and entrypoint
//! contracts on destination chains, carried by untrusted relayers.

pub mod destination;
pub mod network;
pub mod packet;
pub mod relayer;
pub mod store;

use thiserror::Error;

pub use destination::{DestinationChain, EntrypointContract};
pub use network::{Network, Topology, TraceEntry};
pub use packet::{
    decapsulate, encapsulate, packet_commitment, packet_key, Packet, PacketData, Path, Phase,
    Verdict, ENTRYPOINT_PORT, WILL_PORT,
};
pub use relayer::{Proof, Relayer};
pub use store::PacketStore;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterchainError {
    #[error("output cannot be encapsulated into a packet")]
    NotEncapsulable,
    #[error("malformed packet payload")]
    MalformedPayload,
    #[error("unknown channel {0}")]
    ChannelNotFound(String),
    #[error("channel {0} does not have the will module as exactly one endpoint")]
    PathConstraint(String),
    #[error("packet {0} already received")]
    ReplayRejected(String),
    #[error("packet {0} is not addressed to this chain")]
    Misrouted(String),
    #[error("no pending handshake for {0}")]
    UnknownHandshake(String),
    #[error("unexpected {0} packet")]
    UnexpectedPhase(String),
    #[error("unknown chain {0}")]
    UnknownChain(String),
}

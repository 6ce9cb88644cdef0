//! Deterministic simulator for a decentralized digital-will protocol.
//!
//! Modules, bottom-up:
//!
//! - [`crypto`]: prime-order groups, Pedersen commitments, Schnorr
//!   signatures with aggregation, discrete-log knowledge proofs and
//!   layered hybrid encryption.
//! - [`claims`]: claim evidence and its verification dispatch.
//! - [`will`]: wills, components and their transitions, DIDs, soulbound
//!   tokens and refungible shares.
//! - [`chain`]: the single-chain runtime hosting the will module.
//! - [`interchain`]: destination chains, entrypoint contracts, packets and
//!   relayers.
//! - [`vault`]: chunked on-chain file storage and encrypted deeds.
//! - [`scenario`]: scenario files, snapshots and reports driven by the CLI.

#![allow(clippy::large_enum_variant)]

pub mod address;
pub mod chain;
pub mod claims;
pub mod codec;
pub mod crypto;
pub mod hash;
pub mod interchain;
pub mod scenario;
pub mod vault;
pub mod will;

pub use address::Address;
pub use claims::{ClaimEvidence, ClaimRequirement, ClaimType};
pub use will::{Did, SoulboundToken, Will, WillComponent};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::address::Address;
use crate::chain::WillDefinition;
use crate::claims::ClaimEvidence;
use crate::will::{ComponentState, Did, Emitted, WillStatus};

/// How the runner builds claim evidence for a named claimant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvidenceSpec {
    /// Claimant signs the claim message with its own key.
    Direct,
    Pedersen {
        m: u64,
        r: u64,
    },
    /// Every named signer signs the claim message; signatures are
    /// aggregated against the chain's key registry.
    Aggregate {
        signers: Vec<String>,
    },
    /// Knowledge of the named key's secret, bound to the claim message.
    Knowledge {
        key: String,
    },
    /// The named key's signature over the fixed challenge.
    SignatureReveal {
        key: String,
    },
    Raw {
        evidence: ClaimEvidence,
    },
}

/// A deed to encrypt into one component before the will is created.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeedSpec {
    pub component: usize,
    pub beneficiary: String,
    pub temporary: String,
    pub content: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    CreateWill {
        who: String,
        #[serde(rename = "as")]
        bind: String,
        will: WillDefinition,
        #[serde(default)]
        deeds: Vec<DeedSpec>,
    },
    Checkin {
        who: String,
        will: Did,
    },
    Claim {
        who: String,
        will: Did,
        component: String,
        evidence: EvidenceSpec,
    },
    Transfer {
        who: String,
        to: Address,
        amount: u64,
        #[serde(default)]
        denom: Option<String>,
    },
    Approve {
        who: String,
        chain_id: String,
        address: String,
    },
    RegisterKey {
        who: String,
    },
    RftClaim {
        who: String,
        will: Did,
    },
    Noop {
        who: String,
    },
    Advance {
        blocks: u64,
    },
    AdvanceTo {
        height: u64,
    },
    /// Relayer rounds; without `steps`, runs until nothing moves.
    Relay {
        #[serde(default)]
        steps: Option<u64>,
    },
    StoreFile {
        #[serde(rename = "as")]
        bind: String,
        #[serde(default)]
        content: Option<String>,
        /// Random bytes of this length when no content is given.
        #[serde(default)]
        size: Option<usize>,
        #[serde(default)]
        chunk_size: Option<usize>,
    },
    RetrieveFile {
        file: String,
        #[serde(default)]
        expect_content: Option<String>,
    },
    TamperCell {
        file: String,
        chunk: usize,
        #[serde(default)]
        offset: usize,
    },
    DeleteCell {
        file: String,
        chunk: usize,
    },
    RevealKey {
        will: Did,
        component: String,
        temporary: String,
    },
    Repeat {
        times: u64,
        steps: Vec<Value>,
    },
    Expect(Check),
}

impl Step {
    pub fn op(&self) -> &'static str {
        match self {
            Step::CreateWill { .. } => "create_will",
            Step::Checkin { .. } => "checkin",
            Step::Claim { .. } => "claim",
            Step::Transfer { .. } => "transfer",
            Step::Approve { .. } => "approve",
            Step::RegisterKey { .. } => "register_key",
            Step::RftClaim { .. } => "rft_claim",
            Step::Noop { .. } => "noop",
            Step::Advance { .. } => "advance",
            Step::AdvanceTo { .. } => "advance_to",
            Step::Relay { .. } => "relay",
            Step::StoreFile { .. } => "store_file",
            Step::RetrieveFile { .. } => "retrieve_file",
            Step::TamperCell { .. } => "tamper_cell",
            Step::DeleteCell { .. } => "delete_cell",
            Step::RevealKey { .. } => "reveal_key",
            Step::Repeat { .. } => "repeat",
            Step::Expect(_) => "expect",
        }
    }
}

/// A step plus the error it is expected to fail with, if any.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepEntry {
    #[serde(flatten)]
    pub step: Step,
    /// Substring of the expected error message.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Check {
    Balance {
        account: Address,
        #[serde(default)]
        denom: Option<String>,
        equals: u64,
    },
    DestinationBalance {
        chain: String,
        address: String,
        denom: String,
        equals: u64,
    },
    DestinationEscrow {
        chain: String,
        denom: String,
        equals: u64,
    },
    ComponentState {
        will: Did,
        component: String,
        state: ComponentState,
    },
    WillStatus {
        will: Did,
        status: WillStatus,
    },
    Expiration {
        will: Did,
        equals: u64,
    },
    Height {
        equals: u64,
    },
    Burned {
        equals: u64,
    },
    Conserved,
    /// Events of `kind` on `chain` (home by default) whose attributes
    /// include every pair in `attrs`.
    EventCount {
        kind: String,
        #[serde(default)]
        chain: Option<String>,
        #[serde(default)]
        attrs: BTreeMap<String, String>,
        equals: u64,
    },
    /// Height of the single matching home event.
    EventHeight {
        kind: String,
        #[serde(default)]
        attrs: BTreeMap<String, String>,
        equals: u64,
    },
    Outputs {
        will: Did,
        expect: Vec<Emitted>,
    },
    TokenOwner {
        will: Did,
        owner: Address,
    },
    /// The last revealed inner layer of this component opens under the
    /// beneficiary's key to `equals`.
    DeedRecovered {
        will: Did,
        component: String,
        beneficiary: String,
        equals: String,
    },
    /// Every accepted delivery has a matching commitment at its source.
    CommitmentSoundness,
    TraceCount {
        outcome: String,
        #[serde(default)]
        min: Option<u64>,
        #[serde(default)]
        equals: Option<u64>,
    },
}

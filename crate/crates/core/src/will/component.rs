//! Will components: the `(type, access, output, transition)` tuple.
//!
//! Transition table implemented by [`step_component`]:
//!
//! | state      | Expire             | ClaimSubmitted (valid)                 | ClaimWindowElapsed | CheckinOccurred |
//! |------------|--------------------|----------------------------------------|--------------------|-----------------|
//! | inactive   | exec: executed+out | pre-exp: active / post-exp: executed   | –                  | –               |
//! |            | claim: –           | (execution components: not claimable)  |                    |                 |
//! | active     | –                  | error: claim pending                   | executed + outputs | cancelled       |
//! | cancelled  | –                  | same as inactive                       | –                  | –               |
//! | executed   | –                  | error: already executed                | –                  | –               |
//!
//! `–` leaves the component unchanged and emits nothing. Invalid evidence
//! and denied access are errors and never change state.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::address::Address;
use crate::claims::{
    check_access, claim_message, verify_claim, ClaimEvidence, ClaimRequirement, ClaimType,
};
use crate::will::{Did, WillError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Private,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessControl {
    pub visibility: Visibility,
    #[serde(default)]
    pub allowed: Vec<Address>,
}

impl AccessControl {
    pub fn public() -> Self {
        AccessControl {
            visibility: Visibility::Public,
            allowed: Vec::new(),
        }
    }

    pub fn private(allowed: Vec<Address>) -> Self {
        AccessControl {
            visibility: Visibility::Private,
            allowed,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.visibility == Visibility::Public || !self.allowed.is_empty()
    }

    pub fn allows(&self, caller: &Address) -> bool {
        match self.visibility {
            Visibility::Public => true,
            Visibility::Private => self.allowed.contains(caller),
        }
    }
}

/// What a component produces when it executes. Amounts are in the
/// micro-denomination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentOutput {
    TransferEmit {
        to: Address,
        amount: u64,
        denom: String,
        message: String,
    },
    Transfer {
        to: Address,
        amount: u64,
        denom: String,
    },
    IbcSend {
        channel: String,
        address: String,
        amount: u64,
        denom: String,
    },
    ContractCall {
        contract_address: String,
        payload: String,
    },
    Emit {
        message: String,
    },
}

impl ComponentOutput {
    /// The outputs actually emitted on execution. A transfer-with-emission
    /// yields the transfer followed by the message.
    pub fn expand(&self) -> Vec<ComponentOutput> {
        match self {
            ComponentOutput::TransferEmit {
                to,
                amount,
                denom,
                message,
            } => vec![
                ComponentOutput::Transfer {
                    to: *to,
                    amount: *amount,
                    denom: denom.clone(),
                },
                ComponentOutput::Emit {
                    message: message.clone(),
                },
            ],
            other => vec![other.clone()],
        }
    }

    pub fn is_interchain(&self) -> bool {
        matches!(
            self,
            ComponentOutput::IbcSend { .. } | ComponentOutput::ContractCall { .. }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExecutionTag {
    Transfer,
    IbcMsg,
    ContractCall,
}

impl ExecutionTag {
    pub const ALL: [ExecutionTag; 3] = [
        ExecutionTag::Transfer,
        ExecutionTag::IbcMsg,
        ExecutionTag::ContractCall,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExecutionTag::Transfer => "transfer",
            ExecutionTag::IbcMsg => "ibc-msg",
            ExecutionTag::ContractCall => "contract-call",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Trigger {
    /// Fires automatically when the will expires.
    Execution(ExecutionTag),
    /// Fires when a beneficiary proves a claim.
    Claim(ClaimType),
}

/// Component type string such as `schnorr-claim+transfer`: a trigger
/// followed by an optional `+action` suffix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComponentType {
    pub trigger: Trigger,
    pub action: String,
}

impl ComponentType {
    pub fn claim(t: ClaimType, action: &str) -> Self {
        ComponentType {
            trigger: Trigger::Claim(t),
            action: action.to_string(),
        }
    }

    pub fn execution(t: ExecutionTag, action: &str) -> Self {
        ComponentType {
            trigger: Trigger::Execution(t),
            action: action.to_string(),
        }
    }

    pub fn claim_type(&self) -> Option<ClaimType> {
        match self.trigger {
            Trigger::Claim(t) => Some(t),
            Trigger::Execution(_) => None,
        }
    }

    pub fn is_claim(&self) -> bool {
        self.claim_type().is_some()
    }
}

impl fmt::Display for ComponentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self.trigger {
            Trigger::Execution(t) => t.as_str(),
            Trigger::Claim(t) => t.as_str(),
        };
        if self.action.is_empty() {
            f.write_str(head)
        } else {
            write!(f, "{head}+{}", self.action)
        }
    }
}

impl FromStr for ComponentType {
    type Err = WillError;

    fn from_str(s: &str) -> Result<Self, WillError> {
        let (head, action) = s.split_once('+').unwrap_or((s, ""));
        let trigger = if let Some(t) = ExecutionTag::ALL.into_iter().find(|t| t.as_str() == head) {
            Trigger::Execution(t)
        } else {
            Trigger::Claim(head.parse::<ClaimType>()?)
        };
        Ok(ComponentType {
            trigger,
            action: action.to_string(),
        })
    }
}

impl Serialize for ComponentType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ComponentType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentState {
    Inactive,
    Active,
    Executed,
    Cancelled,
}

impl ComponentState {
    pub const ALL: [ComponentState; 4] = [
        ComponentState::Inactive,
        ComponentState::Active,
        ComponentState::Executed,
        ComponentState::Cancelled,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimWindow {
    pub start: u64,
    pub length: u64,
    pub claimant: Address,
}

impl ClaimWindow {
    pub fn end(&self) -> u64 {
        self.start + self.length
    }
}

/// A component as written in a will definition, before it gets an id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSpec {
    #[serde(rename = "type")]
    pub ctype: ComponentType,
    pub access: AccessControl,
    pub output: ComponentOutput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub requirement: Option<ClaimRequirement>,
}

impl ComponentSpec {
    pub fn validate(&self) -> Result<(), WillError> {
        if !self.access.is_valid() {
            return Err(WillError::Validation("private access list is empty".into()));
        }
        match (self.ctype.claim_type(), &self.requirement) {
            (Some(t), Some(req)) => {
                req.validate()?;
                if req.claim_type != t {
                    return Err(WillError::Validation(format!(
                        "component type {} carries a {} requirement",
                        self.ctype, req.claim_type
                    )));
                }
                Ok(())
            }
            (Some(_), None) => Err(WillError::Validation(format!(
                "claim component {} has no requirement",
                self.ctype
            ))),
            (None, Some(_)) => Err(WillError::Validation(format!(
                "execution component {} must not carry a requirement",
                self.ctype
            ))),
            (None, None) => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WillComponent {
    pub id: String,
    #[serde(rename = "type")]
    pub ctype: ComponentType,
    pub access: AccessControl,
    pub output: ComponentOutput,
    pub requirement: Option<ClaimRequirement>,
    pub state: ComponentState,
    pub claim_window: Option<ClaimWindow>,
}

impl WillComponent {
    pub fn from_spec(id: String, spec: ComponentSpec) -> Self {
        WillComponent {
            id,
            ctype: spec.ctype,
            access: spec.access,
            output: spec.output,
            requirement: spec.requirement,
            state: ComponentState::Inactive,
            claim_window: None,
        }
    }

    pub fn is_claim(&self) -> bool {
        self.ctype.is_claim()
    }

    /// A claim component that has not executed yet.
    pub fn is_claimable(&self) -> bool {
        self.is_claim() && self.state != ComponentState::Executed
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExecutionEvent {
    Expire,
    ClaimSubmitted {
        evidence: ClaimEvidence,
        claimant: Address,
        height: u64,
    },
    ClaimWindowElapsed,
    CheckinOccurred,
}

/// Facts about the surrounding will and chain a transition needs.
#[derive(Clone, Debug)]
pub struct StepContext<'a> {
    pub did: &'a Did,
    pub chain_id: &'a str,
    pub will_expired: bool,
    pub window_length: u64,
}

pub fn step_component(
    comp: &WillComponent,
    event: &ExecutionEvent,
    ctx: &StepContext<'_>,
) -> Result<(WillComponent, Vec<ComponentOutput>), WillError> {
    use ComponentState::*;

    let unchanged = || Ok((comp.clone(), Vec::new()));
    let execute = || {
        let mut next = comp.clone();
        next.state = Executed;
        next.claim_window = None;
        Ok((next, comp.output.expand()))
    };

    match (comp.state, event) {
        (Executed, ExecutionEvent::ClaimSubmitted { .. }) => {
            Err(WillError::AlreadyExecuted(comp.id.clone()))
        }
        (Executed, _) => unchanged(),

        (Inactive, ExecutionEvent::Expire) if !comp.is_claim() => execute(),
        (_, ExecutionEvent::ClaimSubmitted { .. }) if !comp.is_claim() => {
            Err(WillError::NotClaimable(comp.id.clone()))
        }

        (Active, ExecutionEvent::ClaimSubmitted { .. }) => {
            Err(WillError::ClaimPending(comp.id.clone()))
        }
        (
            Inactive | Cancelled,
            ExecutionEvent::ClaimSubmitted {
                evidence,
                claimant,
                height,
            },
        ) => {
            let req = comp.requirement.as_ref().ok_or_else(|| {
                WillError::Validation(format!("claim component {} has no requirement", comp.id))
            })?;
            if !check_access(req, claimant) || !comp.access.allows(claimant) {
                return Err(WillError::Unauthorized);
            }
            let msg = claim_message(ctx.did, &comp.id, claimant, ctx.chain_id);
            if !verify_claim(req, evidence, &msg)? {
                return Err(WillError::ClaimRejected(comp.id.clone()));
            }
            if ctx.will_expired {
                execute()
            } else {
                let mut next = comp.clone();
                next.state = Active;
                next.claim_window = Some(ClaimWindow {
                    start: *height,
                    length: ctx.window_length,
                    claimant: *claimant,
                });
                Ok((next, Vec::new()))
            }
        }

        (Active, ExecutionEvent::ClaimWindowElapsed) => execute(),
        (Active, ExecutionEvent::CheckinOccurred) => {
            let mut next = comp.clone();
            next.state = Cancelled;
            next.claim_window = None;
            Ok((next, Vec::new()))
        }

        _ => unchanged(),
    }
}

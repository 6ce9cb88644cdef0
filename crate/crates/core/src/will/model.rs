use serde::{Deserialize, Serialize};

use crate::address::Address;
use crate::crypto::GroupElement;
use crate::will::component::{
    step_component, ComponentOutput, ComponentSpec, ExecutionEvent, StepContext, WillComponent,
};
use crate::will::did::{Did, SoulboundToken};
use crate::will::WillError;

pub const DEFAULT_CLAIM_WINDOW: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WillStatus {
    Active,
    Expired,
    Executed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Will {
    pub did: Did,
    pub creator: Address,
    pub created_at: u64,
    pub expiration: u64,
    pub components: Vec<WillComponent>,
    pub beneficiaries: Vec<Address>,
    pub status: WillStatus,
    pub claim_window: u64,
}

/// One output tagged with the component that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Emitted {
    pub component: String,
    pub output: ComponentOutput,
}

/// Everything needed to create a will.
#[derive(Clone, Debug)]
pub struct WillDraft {
    pub expiration: u64,
    pub components: Vec<ComponentSpec>,
    pub beneficiaries: Vec<Address>,
    pub claim_window: Option<u64>,
}

/// Builds a will and its soulbound token. `is_approved` decides whether an
/// interchain output points at a contract the creator approved.
pub fn create_will(
    creator_pk: &GroupElement,
    draft: WillDraft,
    nonce: u64,
    current_height: u64,
    is_approved: impl Fn(&ComponentOutput) -> bool,
) -> Result<(Will, SoulboundToken), WillError> {
    if draft.components.is_empty() {
        return Err(WillError::Validation(
            "must have at least one component".into(),
        ));
    }
    if draft.expiration <= current_height {
        return Err(WillError::Validation(format!(
            "expiration {} is not after current height {current_height}",
            draft.expiration
        )));
    }
    for spec in &draft.components {
        spec.validate()?;
        if spec.output.is_interchain() && !is_approved(&spec.output) {
            return Err(WillError::ApprovalMissing(describe_target(&spec.output)));
        }
    }
    let token = SoulboundToken::mint(creator_pk, nonce);
    let did = token.will().clone();
    let components = draft
        .components
        .into_iter()
        .enumerate()
        .map(|(i, spec)| WillComponent::from_spec(format!("c{i}"), spec))
        .collect();
    let will = Will {
        did,
        creator: *token.owner(),
        created_at: current_height,
        expiration: draft.expiration,
        components,
        beneficiaries: draft.beneficiaries,
        status: WillStatus::Active,
        claim_window: draft.claim_window.unwrap_or(DEFAULT_CLAIM_WINDOW),
    };
    Ok((will, token))
}

fn describe_target(output: &ComponentOutput) -> String {
    match output {
        ComponentOutput::IbcSend { channel, .. } => format!("channel {channel}"),
        ComponentOutput::ContractCall {
            contract_address, ..
        } => format!("contract {contract_address}"),
        other => format!("{other:?}"),
    }
}

impl Will {
    pub fn component(&self, id: &str) -> Option<&WillComponent> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn component_index(&self, id: &str) -> Result<usize, WillError> {
        self.components
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| WillError::UnknownComponent(id.to_string()))
    }

    pub fn is_expired(&self) -> bool {
        self.status != WillStatus::Active
    }

    pub fn context<'a>(&'a self, chain_id: &'a str) -> StepContext<'a> {
        StepContext {
            did: &self.did,
            chain_id,
            will_expired: self.is_expired(),
            window_length: self.claim_window,
        }
    }

    /// Recomputes the status of an expired will: executed once nothing is
    /// left to claim.
    pub fn settle(&mut self) {
        if self.status != WillStatus::Active {
            self.status = if self.components.iter().any(WillComponent::is_claimable) {
                WillStatus::Expired
            } else {
                WillStatus::Executed
            };
        }
    }

    /// Applies one event to one component and settles the will.
    pub fn step(
        &mut self,
        index: usize,
        event: &ExecutionEvent,
        chain_id: &str,
    ) -> Result<Vec<Emitted>, WillError> {
        let (next, outputs) =
            step_component(&self.components[index], event, &self.context(chain_id))?;
        let id = next.id.clone();
        self.components[index] = next;
        self.settle();
        Ok(outputs
            .into_iter()
            .map(|output| Emitted {
                component: id.clone(),
                output,
            })
            .collect())
    }
}

/// Fires every execution component in stored order. Claim components stay
/// put and become claimable without a window.
pub fn execute_will(
    w: &Will,
    height: u64,
    chain_id: &str,
) -> Result<(Will, Vec<Emitted>), WillError> {
    if height < w.expiration {
        return Err(WillError::PrematureExecution {
            height,
            expiration: w.expiration,
        });
    }
    let mut next = w.clone();
    if next.status == WillStatus::Executed {
        return Ok((next, Vec::new()));
    }
    next.status = WillStatus::Expired;
    let mut emitted = Vec::new();
    for i in 0..next.components.len() {
        emitted.extend(next.step(i, &ExecutionEvent::Expire, chain_id)?);
    }
    next.settle();
    Ok((next, emitted))
}

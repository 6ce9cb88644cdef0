//! Will data model, component transitions and share accounting.

pub mod component;
pub mod did;
pub mod model;
pub mod shares;

use thiserror::Error;

use crate::claims::ClaimError;

pub use component::{
    step_component, AccessControl, ClaimWindow, ComponentOutput, ComponentSpec, ComponentState,
    ComponentType, ExecutionEvent, ExecutionTag, StepContext, Trigger, Visibility, WillComponent,
};
pub use did::{Did, SoulboundToken};
pub use model::{
    create_will, execute_will, Emitted, Will, WillDraft, WillStatus, DEFAULT_CLAIM_WINDOW,
};
pub use shares::{mint_rft, rft_claim, ShareLedger};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WillError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("approval missing for {0}")]
    ApprovalMissing(String),
    #[error("claim rejected for component {0}: evidence does not verify")]
    ClaimRejected(String),
    #[error("unauthorized")]
    Unauthorized,
    #[error("component {0} is not claimable")]
    NotClaimable(String),
    #[error("component {0} already has a pending claim")]
    ClaimPending(String),
    #[error("component {0} already executed")]
    AlreadyExecuted(String),
    #[error("unknown component {0}")]
    UnknownComponent(String),
    #[error("premature execution: height {height} is before expiration {expiration}")]
    PrematureExecution { height: u64, expiration: u64 },
    #[error("premature claim: will has not expired")]
    PrematureClaim,
    #[error("nothing to claim")]
    NothingToClaim,
    #[error(transparent)]
    Claim(#[from] ClaimError),
}

//! The component transition table, written out row by row and compared
//! against `step_component` for every reachable (kind, state, event,
//! expired) combination.

use willchain_core::claims::{claim_message, Expected};
use willchain_core::crypto::schnorr::sign;
use willchain_core::crypto::{KeyPair, NonceSource};
use willchain_core::will::{
    step_component, AccessControl, ClaimWindow, ComponentOutput, ComponentSpec, ComponentState,
    ExecutionEvent, StepContext, WillComponent,
};
use willchain_core::{Address, ClaimEvidence, ClaimRequirement, Did};

use super::Check;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Execution,
    Claim,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ev {
    Expire,
    ValidClaim,
    BadEvidence,
    Outsider,
    WindowElapsed,
    Checkin,
}

const EVENTS: [Ev; 6] = [
    Ev::Expire,
    Ev::ValidClaim,
    Ev::BadEvidence,
    Ev::Outsider,
    Ev::WindowElapsed,
    Ev::Checkin,
];

#[derive(Debug, PartialEq, Eq)]
enum Want {
    Same,
    To(ComponentState, bool),
    Err(&'static str),
}

fn table(kind: Kind, state: ComponentState, ev: Ev, expired: bool) -> Want {
    use ComponentState::*;
    let claim_ev = matches!(ev, Ev::ValidClaim | Ev::BadEvidence | Ev::Outsider);
    match (kind, state) {
        (_, Executed) if claim_ev => Want::Err("already executed"),
        (_, Executed) => Want::Same,
        (Kind::Execution, Inactive) if ev == Ev::Expire => Want::To(Executed, true),
        (Kind::Execution, _) if claim_ev => Want::Err("not claimable"),
        (Kind::Execution, _) => Want::Same,
        (Kind::Claim, Active) if claim_ev => Want::Err("pending claim"),
        (Kind::Claim, Active) if ev == Ev::WindowElapsed => Want::To(Executed, true),
        (Kind::Claim, Active) if ev == Ev::Checkin => Want::To(Cancelled, false),
        (Kind::Claim, Inactive | Cancelled) if ev == Ev::Outsider => Want::Err("unauthorized"),
        (Kind::Claim, Inactive | Cancelled) if ev == Ev::BadEvidence => Want::Err("claim rejected"),
        (Kind::Claim, Inactive | Cancelled) if ev == Ev::ValidClaim && expired => {
            Want::To(Executed, true)
        }
        (Kind::Claim, Inactive | Cancelled) if ev == Ev::ValidClaim => Want::To(Active, false),
        _ => Want::Same,
    }
}

struct Fixture {
    did: Did,
    heir: KeyPair,
    outsider: KeyPair,
}

impl Fixture {
    fn new() -> Self {
        let creator = KeyPair::from_seed(b"creator");
        Fixture {
            did: Did::derive(&creator.public, 0),
            heir: KeyPair::from_seed(b"heir"),
            outsider: KeyPair::from_seed(b"outsider"),
        }
    }

    fn component(&self, kind: Kind, state: ComponentState) -> WillComponent {
        let heir = Address::from_public_key(&self.heir.public);
        let output = ComponentOutput::Transfer {
            to: heir,
            amount: 5,
            denom: "uwill".into(),
        };
        let spec = match kind {
            Kind::Execution => ComponentSpec {
                ctype: "transfer".parse().unwrap(),
                access: AccessControl::public(),
                output,
                requirement: None,
            },
            Kind::Claim => ComponentSpec {
                ctype: "direct+transfer".parse().unwrap(),
                access: AccessControl::private(vec![heir]),
                output,
                requirement: Some(
                    ClaimRequirement::new(
                        Expected::BeneficiaryAddress { address: heir },
                        AccessControl::private(vec![heir]),
                    )
                    .unwrap(),
                ),
            },
        };
        spec.validate().unwrap();
        let mut c = WillComponent::from_spec("c0".into(), spec);
        c.state = state;
        if state == ComponentState::Active {
            c.claim_window = Some(ClaimWindow {
                start: 3,
                length: 10,
                claimant: heir,
            });
        }
        c
    }

    fn claim(&self, signer: &KeyPair, claimant: &KeyPair) -> ExecutionEvent {
        let claimant = Address::from_public_key(&claimant.public);
        let msg = claim_message(&self.did, "c0", &claimant, "chain");
        ExecutionEvent::ClaimSubmitted {
            evidence: ClaimEvidence::DirectSig {
                signature: sign(signer, &msg, &mut NonceSource::from_u64(1)),
                public_key: signer.public,
            },
            claimant,
            height: 7,
        }
    }

    fn event(&self, ev: Ev) -> ExecutionEvent {
        match ev {
            Ev::Expire => ExecutionEvent::Expire,
            Ev::ValidClaim => self.claim(&self.heir, &self.heir),
            Ev::BadEvidence => self.claim(&self.outsider, &self.heir),
            Ev::Outsider => self.claim(&self.outsider, &self.outsider),
            Ev::WindowElapsed => ExecutionEvent::ClaimWindowElapsed,
            Ev::Checkin => ExecutionEvent::CheckinOccurred,
        }
    }

    fn context(&self, chain_id: &'static str, expired: bool, window: u64) -> StepContext<'_> {
        StepContext {
            did: &self.did,
            chain_id,
            will_expired: expired,
            window_length: window,
        }
    }
}

/// Every reachable cell of the table. Execution components never open
/// windows, so they are only ever inactive or executed.
pub fn table_check() -> Check {
    let f = Fixture::new();
    let mut cases = 0;
    for kind in [Kind::Execution, Kind::Claim] {
        for state in ComponentState::ALL {
            if kind == Kind::Execution
                && matches!(state, ComponentState::Active | ComponentState::Cancelled)
            {
                continue;
            }
            for ev in EVENTS {
                for expired in [false, true] {
                    let comp = f.component(kind, state);
                    let got = step_component(&comp, &f.event(ev), &f.context("chain", expired, 10));
                    let case = format!("{kind:?} {state:?} {ev:?} expired={expired}");
                    match (table(kind, state, ev, expired), got) {
                        (Want::Same, Ok((next, out))) => {
                            if next != comp || !out.is_empty() {
                                return Err(format!("{case}: changed to {:?}", next.state));
                            }
                        }
                        (Want::To(s, emits), Ok((next, out))) => {
                            if next.state != s {
                                return Err(format!(
                                    "{case}: reached {:?}, wanted {s:?}",
                                    next.state
                                ));
                            }
                            if emits && out != comp.output.expand() || !emits && !out.is_empty() {
                                return Err(format!("{case}: emitted {out:?}"));
                            }
                            if next.claim_window.is_some() != (s == ComponentState::Active) {
                                return Err(format!("{case}: window {:?}", next.claim_window));
                            }
                        }
                        (Want::Err(msg), Err(e)) if e.to_string().contains(msg) => {}
                        (want, got) => return Err(format!("{case}: wanted {want:?}, got {got:?}")),
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} transitions"))
}

/// A claim before expiry opens a window recording the claimant and height.
pub fn window_opening() -> Check {
    let f = Fixture::new();
    let comp = f.component(Kind::Claim, ComponentState::Inactive);
    let (next, _) = step_component(
        &comp,
        &f.event(Ev::ValidClaim),
        &f.context("chain", false, 30),
    )
    .map_err(|e| e.to_string())?;
    let w = next.claim_window.ok_or("no window")?;
    if (w.start, w.length, w.end()) != (7, 30, 37) {
        return Err(format!("window {w:?}"));
    }
    if w.claimant != Address::from_public_key(&f.heir.public) {
        return Err("wrong claimant recorded".into());
    }
    Ok("window [7, 37)".into())
}

/// Evidence bound to one chain does not verify on another.
pub fn cross_chain_evidence() -> Check {
    let f = Fixture::new();
    let comp = f.component(Kind::Claim, ComponentState::Inactive);
    match step_component(
        &comp,
        &f.event(Ev::ValidClaim),
        &f.context("other-chain", true, 10),
    ) {
        Err(willchain_core::will::WillError::ClaimRejected(_)) => Ok("rejected".into()),
        other => Err(format!("got {other:?}")),
    }
}

use std::collections::BTreeSet;

use crate::address::Address;
use crate::chain::state::{Account, Approval, ChainState, Handshake, HandshakeKind};
use crate::chain::tx::{SignedTx, TxBody, WillDefinition};
use crate::chain::ChainError;
use crate::claims::ClaimEvidence;
use crate::crypto::{DlogProof, GroupElement};
use crate::vault::deed_reference;
use crate::will::{
    create_will, execute_will, mint_rft, rft_claim, step_component, ComponentOutput,
    ComponentState, Did, Emitted, ExecutionEvent, WillError, WillStatus,
};

impl ChainState {
    /// Applies a signed transaction atomically: either every effect lands
    /// or the state is left untouched.
    pub fn apply_tx(&mut self, stx: &SignedTx) -> Result<(), ChainError> {
        // The vault and the event log are moved rather than cloned; events
        // are append-only, so rolling back is a truncation.
        let vault = std::mem::take(&mut self.vault);
        let events = std::mem::take(&mut self.events);
        let logged = events.len();
        let mut next = self.clone();
        next.vault = vault;
        next.events = events;
        match next.execute_tx(stx) {
            Ok(()) => {
                log::debug!(target: "willchain::tx", "{} accepted tx {} from {}", self.chain_id, stx.tx.sequence, stx.tx.sender);
                *self = next;
                Ok(())
            }
            Err(e) => {
                log::debug!(target: "willchain::tx", "{} rejected tx from {}: {e}", self.chain_id, stx.tx.sender);
                self.vault = next.vault;
                next.events.truncate(logged);
                self.events = next.events;
                Err(e)
            }
        }
    }

    fn execute_tx(&mut self, stx: &SignedTx) -> Result<(), ChainError> {
        stx.authenticate(&self.chain_id)?;
        let tx = &stx.tx;
        let sender = tx.sender;
        let acct = self
            .accounts
            .get_mut(&sender)
            .ok_or(ChainError::UnknownAccount(sender))?;
        match acct.public_key {
            Some(pk) if pk != stx.public_key => {
                return Err(ChainError::Auth("key does not match account".into()))
            }
            Some(_) => {}
            None => acct.public_key = Some(stx.public_key),
        }
        if tx.sequence != acct.sequence {
            return Err(ChainError::Sequence {
                expected: acct.sequence,
                got: tx.sequence,
            });
        }
        acct.sequence += 1;
        let payer = acct.sponsor.unwrap_or(sender);
        if let Some(requested) = tx.fee_payer {
            if requested != payer {
                return Err(ChainError::Auth(format!(
                    "{requested} does not pay fees for {sender}"
                )));
            }
        }
        let fee = self.params.tx_fee;
        let denom = self.params.native_denom.clone();
        self.debit(&payer, &denom, fee)?;
        self.fee_pool += fee;

        match &tx.body {
            TxBody::CreateWill { will } => {
                self.create_will_tx(sender, stx.public_key, will)?;
            }
            TxBody::Checkin { did } => self.checkin(&sender, did)?,
            TxBody::Claim {
                did,
                component,
                evidence,
            } => self.submit_claim(sender, did, component, evidence)?,
            TxBody::Transfer { to, amount, denom } => {
                self.debit(&sender, denom, *amount)?;
                self.credit(to, denom, *amount);
                self.emit(
                    "transfer",
                    &[
                        ("from", sender.to_string()),
                        ("to", to.to_string()),
                        ("amount", amount.to_string()),
                        ("denom", denom.clone()),
                    ],
                );
            }
            TxBody::ApproveContract { chain_id, address } => {
                self.approvals.insert(Approval {
                    creator: sender,
                    chain_id: chain_id.clone(),
                    contract: address.clone(),
                });
                self.emit(
                    "contract_approved",
                    &[
                        ("creator", sender.to_string()),
                        ("chain_id", chain_id.clone()),
                        ("contract", address.clone()),
                    ],
                );
            }
            TxBody::RegisterKey { proof } => self.register_key(&stx.public_key, proof)?,
            TxBody::RftClaim { did } => self.rft_claim_tx(sender, did)?,
            TxBody::Noop => {}
        }
        Ok(())
    }

    fn register_key(&mut self, pk: &GroupElement, proof: &DlogProof) -> Result<(), ChainError> {
        self.key_registry.register(pk, proof)?;
        self.emit("key_registered", &[("key", pk.to_hex())]);
        Ok(())
    }

    /// The channel an interchain output leaves through, if the creator
    /// approved a contract on the other end.
    pub(crate) fn route(&self, creator: &Address, output: &ComponentOutput) -> Option<String> {
        match output {
            ComponentOutput::IbcSend { channel, .. } => {
                let path = self.channels.get(channel)?;
                let approved = self
                    .approvals
                    .iter()
                    .any(|a| a.creator == *creator && a.chain_id == path.destination_chain);
                approved.then(|| channel.clone())
            }
            ComponentOutput::ContractCall {
                contract_address, ..
            } => self
                .approvals
                .iter()
                .filter(|a| a.creator == *creator && a.contract == *contract_address)
                .find_map(|a| {
                    self.channels
                        .iter()
                        .find(|(_, p)| p.destination_chain == a.chain_id)
                        .map(|(c, _)| c.clone())
                }),
            _ => None,
        }
    }

    fn create_will_tx(
        &mut self,
        creator: Address,
        creator_pk: GroupElement,
        def: &WillDefinition,
    ) -> Result<Did, ChainError> {
        for spec in &def.components {
            if let Some(req) = &spec.requirement {
                if let crate::claims::Expected::SignerSet { signers } = &req.expected {
                    if let Some(pk) = signers
                        .iter()
                        .find(|pk| !self.key_registry.is_registered(pk))
                    {
                        return Err(ChainError::Validation(format!(
                            "signer {} has no registered possession proof",
                            pk.to_hex()
                        )));
                    }
                }
            }
        }
        if def.shares.is_empty() && def.rft_escrow > 0 {
            return Err(ChainError::Validation("share escrow without shares".into()));
        }

        let nonce = self.will_nonces.get(&creator).copied().unwrap_or(0);
        let (will, token) = create_will(
            &creator_pk,
            def.draft(self.params.claim_window),
            nonce,
            self.height,
            |out| self.route(&creator, out).is_some(),
        )?;
        self.will_nonces.insert(creator, nonce + 1);
        let did = will.did.clone();

        let mut needed = std::collections::BTreeMap::<String, u64>::new();
        for c in &will.components {
            for out in c.output.expand() {
                if let ComponentOutput::Transfer { amount, denom, .. } = out {
                    let slot = needed.entry(denom).or_insert(0);
                    *slot = slot
                        .checked_add(amount)
                        .ok_or_else(|| ChainError::Validation("escrow total overflows".into()))?;
                }
            }
        }
        for (denom, amount) in &needed {
            self.debit(&creator, denom, *amount)?;
        }
        if !def.shares.is_empty() {
            let ledger = mint_rft(&will, &def.shares, def.rft_escrow)?;
            let native = self.params.native_denom.clone();
            self.debit(&creator, &native, def.rft_escrow)?;
            self.share_ledgers.insert(did.clone(), ledger);
        }
        self.escrow.insert(did.clone(), needed);
        self.expiration_index
            .entry(will.expiration)
            .or_default()
            .insert(did.clone());
        self.emit(
            "will_created",
            &[
                ("did", did.to_string()),
                ("creator", creator.to_string()),
                ("expiration", will.expiration.to_string()),
                ("token_id", hex::encode(token.token_id())),
            ],
        );
        self.tokens.insert(did.clone(), token);
        self.wills.insert(did.clone(), will);
        Ok(did)
    }

    /// Proof of life from the creator: pushes expiration out and cancels
    /// any open claim windows.
    pub fn checkin(&mut self, sender: &Address, did: &Did) -> Result<(), ChainError> {
        let will = self.will(did)?;
        if will.creator != *sender {
            return Err(ChainError::Unauthorized);
        }
        self.reschedule(did)
    }

    /// Check-in relayed by a contract the creator approved.
    pub fn contract_checkin(
        &mut self,
        chain_id: &str,
        contract: &str,
        did: &Did,
    ) -> Result<(), ChainError> {
        let creator = self.will(did)?.creator;
        if !self.is_approved(&creator, chain_id, contract) {
            return Err(ChainError::Unauthorized);
        }
        self.reschedule(did)
    }

    fn reschedule(&mut self, did: &Did) -> Result<(), ChainError> {
        let will = self.will(did)?;
        if will.status != WillStatus::Active || self.height >= will.expiration {
            return Err(ChainError::TooLate(did.clone()));
        }
        let old = will.expiration;
        let new = old.max(self.height + self.params.checkin_period);
        let chain_id = self.chain_id.clone();
        let mut will = will.clone();
        will.expiration = new;
        for i in 0..will.components.len() {
            let comp = &will.components[i];
            if comp.state == ComponentState::Active {
                if let Some(w) = comp.claim_window {
                    let key = (did.clone(), comp.id.clone());
                    if let Some(set) = self.window_index.get_mut(&w.end()) {
                        set.remove(&key);
                        if set.is_empty() {
                            self.window_index.remove(&w.end());
                        }
                    }
                }
                will.step(i, &ExecutionEvent::CheckinOccurred, &chain_id)?;
            }
        }
        self.wills.insert(did.clone(), will);
        if new != old {
            if let Some(set) = self.expiration_index.get_mut(&old) {
                set.remove(did);
                if set.is_empty() {
                    self.expiration_index.remove(&old);
                }
            }
            self.expiration_index
                .entry(new)
                .or_default()
                .insert(did.clone());
        }
        self.emit(
            "checkin",
            &[("did", did.to_string()), ("expiration", new.to_string())],
        );
        Ok(())
    }

    fn submit_claim(
        &mut self,
        claimant: Address,
        did: &Did,
        component: &str,
        evidence: &ClaimEvidence,
    ) -> Result<(), ChainError> {
        let will = self.will(did)?;
        let index = will.component_index(component)?;
        let comp = will.components[index].clone();
        let event = ExecutionEvent::ClaimSubmitted {
            evidence: evidence.clone(),
            claimant,
            height: self.height,
        };

        if comp.is_claim() && comp.output.is_interchain() {
            let pending = self.handshakes.values().any(|h| {
                h.did == *did
                    && h.component == component
                    && matches!(h.kind, HandshakeKind::Claim { .. })
            });
            if pending {
                return Err(WillError::ClaimPending(component.to_string()).into());
            }
            // The evidence is checked here; timing is judged when the
            // destination answers.
            let mut ctx = will.context(&self.chain_id);
            ctx.will_expired = true;
            step_component(&comp, &event, &ctx)?;
            let bond = self.params.penalty_amount;
            let denom = self.params.native_denom.clone();
            self.debit(&claimant, &denom, bond)?;
            self.bonded += bond;
            self.send_init(
                did,
                &comp.id,
                &comp.output,
                HandshakeKind::Claim { claimant, bond },
            )?;
            self.emit(
                "claim_forwarded",
                &[
                    ("did", did.to_string()),
                    ("component", comp.id.clone()),
                    ("claimant", claimant.to_string()),
                ],
            );
            return Ok(());
        }

        let expired = will.is_expired();
        let mut will = will.clone();
        let chain_id = self.chain_id.clone();
        let emitted = will.step(index, &event, &chain_id)?;
        let window = will.components[index].claim_window;
        self.wills.insert(did.clone(), will);
        if expired {
            self.emit(
                "claim_executed",
                &[
                    ("did", did.to_string()),
                    ("component", component.to_string()),
                    ("claimant", claimant.to_string()),
                ],
            );
            self.apply_outputs(did, &emitted);
        } else {
            let penalty = self.params.penalty_amount;
            let denom = self.params.native_denom.clone();
            self.debit(&claimant, &denom, penalty)?;
            self.burned += penalty;
            let end = window.expect("early claim opens a window").end();
            self.window_index
                .entry(end)
                .or_default()
                .insert((did.clone(), component.to_string()));
            self.emit(
                "claim_window_opened",
                &[
                    ("did", did.to_string()),
                    ("component", component.to_string()),
                    ("claimant", claimant.to_string()),
                    ("closes_at", end.to_string()),
                    ("burned", penalty.to_string()),
                ],
            );
        }
        Ok(())
    }

    fn rft_claim_tx(&mut self, claimant: Address, did: &Did) -> Result<(), ChainError> {
        let will = self.will(did)?;
        let ledger = self
            .share_ledgers
            .get(did)
            .ok_or_else(|| ChainError::Validation(format!("will {did} has no shares")))?;
        let (next, payout) = rft_claim(ledger, &claimant, will)?;
        self.share_ledgers.insert(did.clone(), next);
        let denom = self.params.native_denom.clone();
        self.credit(&claimant, &denom, payout);
        self.emit(
            "shares_redeemed",
            &[
                ("did", did.to_string()),
                ("heir", claimant.to_string()),
                ("payout", payout.to_string()),
            ],
        );
        Ok(())
    }

    /// Advances one block: executes wills due at the new height, then
    /// closes claim windows ending there. Failures of individual outputs
    /// are logged and never halt the chain.
    pub fn begin_block(&mut self) -> Vec<Emitted> {
        self.height += 1;
        let height = self.height;
        let chain_id = self.chain_id.clone();
        let mut all = Vec::new();

        let due = self.expiration_index.remove(&height).unwrap_or_default();
        for did in due {
            let Some(will) = self.wills.get(&did) else {
                continue;
            };
            match execute_will(will, height, &chain_id) {
                Ok((next, emitted)) => {
                    self.wills.insert(did.clone(), next);
                    self.emit(
                        "will_executed",
                        &[
                            ("did", did.to_string()),
                            ("outputs", emitted.len().to_string()),
                        ],
                    );
                    self.apply_outputs(&did, &emitted);
                    all.extend(emitted);
                }
                Err(e) => self.emit(
                    "execution_failed",
                    &[("did", did.to_string()), ("error", e.to_string())],
                ),
            }
        }

        let closing: BTreeSet<(Did, String)> =
            self.window_index.remove(&height).unwrap_or_default();
        for (did, component) in closing {
            let Some(will) = self.wills.get(&did) else {
                continue;
            };
            let Ok(index) = will.component_index(&component) else {
                continue;
            };
            let open = will.components[index].state == ComponentState::Active
                && will.components[index]
                    .claim_window
                    .is_some_and(|w| w.end() == height);
            if !open {
                continue;
            }
            let mut will = will.clone();
            match will.step(index, &ExecutionEvent::ClaimWindowElapsed, &chain_id) {
                Ok(emitted) => {
                    self.wills.insert(did.clone(), will);
                    self.emit(
                        "claim_window_closed",
                        &[("did", did.to_string()), ("component", component.clone())],
                    );
                    self.apply_outputs(&did, &emitted);
                    all.extend(emitted);
                }
                Err(e) => self.emit(
                    "execution_failed",
                    &[("did", did.to_string()), ("error", e.to_string())],
                ),
            }
        }
        all
    }

    pub fn advance(&mut self, blocks: u64) -> Vec<Emitted> {
        (0..blocks).flat_map(|_| self.begin_block()).collect()
    }

    pub(crate) fn apply_outputs(&mut self, did: &Did, emitted: &[Emitted]) {
        for e in emitted {
            if !matches!(e.output, ComponentOutput::TransferEmit { .. }) {
                self.log_output(did, e);
            }
            let result = match &e.output {
                ComponentOutput::Transfer { to, amount, denom } => {
                    self.debit_escrow(did, denom, *amount).map(|()| {
                        self.credit(to, denom, *amount);
                        self.emit(
                            "will_transfer",
                            &[
                                ("did", did.to_string()),
                                ("component", e.component.clone()),
                                ("to", to.to_string()),
                                ("amount", amount.to_string()),
                                ("denom", denom.clone()),
                            ],
                        );
                    })
                }
                ComponentOutput::Emit { message } => {
                    let mut attrs = vec![
                        ("did", did.to_string()),
                        ("component", e.component.clone()),
                        ("message", message.clone()),
                    ];
                    if let Some(file) = deed_reference(&e.output) {
                        attrs.push(("deed", file.to_string()));
                    }
                    self.emit("will_message", &attrs);
                    Ok(())
                }
                out @ (ComponentOutput::IbcSend { .. } | ComponentOutput::ContractCall { .. }) => {
                    self.send_init(did, &e.component, out, HandshakeKind::Execution)
                }
                ComponentOutput::TransferEmit { .. } => {
                    let parts: Vec<Emitted> = e
                        .output
                        .expand()
                        .into_iter()
                        .map(|output| Emitted {
                            component: e.component.clone(),
                            output,
                        })
                        .collect();
                    self.apply_outputs(did, &parts);
                    Ok(())
                }
            };
            if let Err(err) = result {
                self.emit(
                    "output_failed",
                    &[
                        ("did", did.to_string()),
                        ("component", e.component.clone()),
                        ("error", err.to_string()),
                    ],
                );
            }
        }
    }

    /// Records that a component produced an output, whatever becomes of it.
    pub(crate) fn log_output(&mut self, did: &Did, e: &Emitted) {
        let output = crate::codec::to_canonical(&e.output).expect("outputs serialize");
        self.emit(
            "output",
            &[
                ("did", did.to_string()),
                ("component", e.component.clone()),
                ("output", output),
            ],
        );
    }

    /// Outputs of `did` in the order they were produced.
    pub fn output_log(&self, did: &Did) -> Vec<Emitted> {
        self.events
            .iter()
            .filter(|ev| ev.kind == "output" && ev.attr("did") == Some(did.as_str()))
            .filter_map(|ev| {
                Some(Emitted {
                    component: ev.attr("component")?.to_string(),
                    output: crate::codec::from_text(ev.attr("output")?).ok()?,
                })
            })
            .collect()
    }

    pub(crate) fn new_handshake(
        &mut self,
        key: String,
        did: &Did,
        component: &str,
        kind: HandshakeKind,
    ) {
        self.handshakes.insert(
            key,
            Handshake {
                did: did.clone(),
                component: component.to_string(),
                kind,
            },
        );
    }

    pub fn ensure_account(&mut self, addr: Address) -> &mut Account {
        self.accounts
            .entry(addr)
            .or_insert_with(|| Account::new(addr))
    }
}

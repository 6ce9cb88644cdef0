use std::collections::BTreeMap;
use std::path::Path as FsPath;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::address::Address;
use crate::chain::{Genesis, NATIVE_DENOM};
use crate::chain::{GenesisAccount, SignedTx, Tx, TxBody};
use crate::claims::{claim_message, signature_hash, ClaimEvidence, SIGNATURE_PROOF_CHALLENGE};
use crate::codec;
use crate::crypto::layered::layered_decrypt_inner;
use crate::crypto::{dlog, schnorr};
use crate::crypto::{
    KeyPair, NonceSource, PedersenParams, Ristretto, Scalar, ScalarField, SchnorrSignature,
};
use crate::hash::{hash32, sha256};
use crate::interchain::{packet_key, Network, Topology};
use crate::scenario::steps::{Check, EvidenceSpec, Step, StepEntry};
use crate::scenario::{ReportRecord, Scenario, ScenarioError};
use crate::will::Did;

/// A running scenario: the network plus the seed its keys derive from and
/// the values earlier steps bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Session {
    pub seed: u64,
    pub vars: BTreeMap<String, String>,
    pub network: Network,
}

fn derive(seed: u64, parts: &[&[u8]]) -> [u8; 32] {
    let seed = seed.to_le_bytes();
    let all: Vec<&[u8]> = std::iter::once(seed.as_slice())
        .chain(parts.iter().copied())
        .collect();
    hash32(b"willchain/scenario/v1", &all)
}

fn input<E: std::fmt::Display>(what: &str) -> impl FnOnce(E) -> ScenarioError + '_ {
    move |e| ScenarioError::input(format!("{what}: {e}"))
}

#[derive(Deserialize)]
struct ExtraGenesis {
    #[serde(default)]
    accounts: Vec<GenesisAccount>,
}

impl Session {
    pub fn start(
        scenario: &Scenario,
        base: Option<&FsPath>,
        seed: u64,
    ) -> Result<Self, ScenarioError> {
        let mut session = Session {
            seed,
            vars: BTreeMap::new(),
            network: Network::new(
                &Genesis {
                    chain_id: scenario.chain_id.clone(),
                    params: scenario.params.clone(),
                    accounts: Vec::new(),
                    supply: None,
                },
                &Topology::default(),
            )?,
        };
        let mut accounts = Vec::new();
        for spec in &scenario.accounts {
            let kp = session.keypair(&spec.name);
            let sponsor = spec.sponsor.as_deref().map(|s| session.address(s));
            accounts.push(GenesisAccount {
                address: Address::from_public_key(&kp.public),
                public_key: Some(kp.public),
                balances: spec.balances.clone(),
                sponsor,
                possession_proof: spec
                    .register_key
                    .then(|| kp.possession_proof(&mut session.nonces(&spec.name, b"pop"))),
            });
        }
        if let Some(g) = &scenario.genesis {
            let extra: ExtraGenesis = serde_json::from_value(session.expand(&g.load(base)?)?)
                .map_err(input("genesis"))?;
            accounts.extend(extra.accounts);
        }
        let mut topology: Topology = match &scenario.topology {
            Some(t) => serde_json::from_value(session.expand(&t.load(base)?)?)
                .map_err(input("topology"))?,
            None => Topology::default(),
        };
        if topology.seed == 0 {
            let d = derive(seed, &[b"relay"]);
            topology.seed = u64::from_le_bytes(d[..8].try_into().expect("8 bytes"));
        }
        let genesis = Genesis {
            chain_id: scenario.chain_id.clone(),
            params: scenario.params.clone(),
            accounts,
            supply: None,
        };
        session.network = Network::new(&genesis, &topology)?;
        Ok(session)
    }

    pub fn keypair(&self, name: &str) -> KeyPair {
        KeyPair::from_seed(&derive(self.seed, &[b"key", name.as_bytes()]))
    }

    pub fn address(&self, name: &str) -> Address {
        Address::from_public_key(&self.keypair(name).public)
    }

    fn nonces(&self, name: &str, purpose: &[u8]) -> NonceSource {
        NonceSource::new(derive(self.seed, &[b"nonce", name.as_bytes(), purpose]))
    }

    fn chain_id(&self) -> String {
        self.network.home.chain_id.clone()
    }

    /// The signature a key reveals for a signature-proof claim.
    pub fn signature_proof(&self, name: &str) -> SchnorrSignature {
        schnorr::sign(
            &self.keypair(name),
            SIGNATURE_PROOF_CHALLENGE,
            &mut self.nonces(name, b"signature-proof"),
        )
    }

    fn expand_str(&self, s: &str) -> Result<String, ScenarioError> {
        if let Some(var) = s.strip_prefix('$') {
            return self
                .vars
                .get(var)
                .cloned()
                .ok_or_else(|| ScenarioError::input(format!("unbound variable ${var}")));
        }
        let Some(rest) = s.strip_prefix('@') else {
            return Ok(s.to_string());
        };
        if let Some(args) = rest.strip_prefix("commit:") {
            let (m, r) = args
                .split_once(':')
                .and_then(|(m, r)| Some((m.parse::<u64>().ok()?, r.parse::<u64>().ok()?)))
                .ok_or_else(|| ScenarioError::input(format!("bad commitment template {s}")))?;
            let c = PedersenParams::standard().commit(&Scalar::from_u64(m), &Scalar::from_u64(r));
            return Ok(c.point.to_hex());
        }
        if let Some(name) = rest.strip_prefix("sighash:") {
            return Ok(hex::encode(signature_hash(&self.signature_proof(name))));
        }
        if let Some(name) = rest.strip_suffix(".pk") {
            return Ok(self.keypair(name).public.to_hex());
        }
        if rest.is_empty() {
            return Err(ScenarioError::input("empty account reference"));
        }
        Ok(self.address(rest).to_string())
    }

    /// Expands templates in every string of `v`, keys included.
    pub fn expand(&self, v: &Value) -> Result<Value, ScenarioError> {
        Ok(match v {
            Value::String(s) => Value::String(self.expand_str(s)?),
            Value::Array(items) => Value::Array(
                items
                    .iter()
                    .map(|i| self.expand(i))
                    .collect::<Result<_, _>>()?,
            ),
            Value::Object(map) => {
                let mut out = serde_json::Map::new();
                for (k, v) in map {
                    out.insert(self.expand_str(k)?, self.expand(v)?);
                }
                Value::Object(out)
            }
            other => other.clone(),
        })
    }

    /// Runs one raw step, appending report records.
    pub fn run_raw(
        &mut self,
        raw: &Value,
        label: &str,
        records: &mut Vec<ReportRecord>,
    ) -> Result<(), ScenarioError> {
        if raw.get("op").and_then(Value::as_str) == Some("repeat") {
            let times = raw
                .get("times")
                .and_then(Value::as_u64)
                .ok_or_else(|| ScenarioError::input(format!("step {label}: repeat needs times")))?;
            let steps = raw
                .get("steps")
                .and_then(Value::as_array)
                .ok_or_else(|| ScenarioError::input(format!("step {label}: repeat needs steps")))?;
            for k in 0..times {
                for (j, s) in steps.iter().enumerate() {
                    self.run_raw(s, &format!("{label}.{k}.{j}"), records)?;
                }
            }
            return Ok(());
        }
        let entry: StepEntry = match self.expand(raw).and_then(|v| {
            serde_json::from_value(v)
                .map_err(|e| ScenarioError::input(format!("step {label}: {e}")))
        }) {
            Ok(entry) => entry,
            Err(e) => {
                records.push(self.record(label, "invalid", "error", &e.to_string()));
                return Err(e);
            }
        };
        let op = entry.step.op();
        let result = self.apply(&entry.step, label);
        let (status, detail, failure) = match (result, &entry.expect_error) {
            (Ok(detail), None) => ("ok", detail, None),
            (Err(e), Some(want)) if e.to_string().contains(want.as_str()) => {
                ("expected_error", e.to_string(), None)
            }
            (Err(e), None) => ("error", e.to_string(), Some(e)),
            (Ok(detail), Some(want)) => {
                let e = ScenarioError::Assertion(format!(
                    "expected an error containing {want:?}, got success: {detail}"
                ));
                ("fail", e.to_string(), Some(e))
            }
            (Err(got), Some(want)) => {
                let e = ScenarioError::Assertion(format!(
                    "expected an error containing {want:?}, got {got}"
                ));
                ("fail", e.to_string(), Some(e))
            }
        };
        let status = match &failure {
            Some(ScenarioError::Assertion(_)) => "fail",
            _ => status,
        };
        records.push(self.record(label, op, status, &detail));
        match failure {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    fn record(&self, label: &str, op: &str, status: &str, detail: &str) -> ReportRecord {
        ReportRecord {
            step: label.to_string(),
            op: op.to_string(),
            status: status.to_string(),
            detail: detail.to_string(),
            height: self.network.home.height,
        }
    }

    pub fn sign(&self, who: &str, body: TxBody) -> SignedTx {
        let kp = self.keypair(who);
        let sender = Address::from_public_key(&kp.public);
        let sequence = self.network.home.account(&sender).map_or(0, |a| a.sequence);
        Tx {
            sender,
            sequence,
            fee_payer: None,
            body,
        }
        .sign(&kp, &self.chain_id(), &mut self.nonces(who, b"tx"))
    }

    fn submit(&mut self, who: &str, body: TxBody) -> Result<(), ScenarioError> {
        let stx = self.sign(who, body);
        Ok(self.network.apply_tx(&stx)?)
    }

    pub fn evidence(
        &self,
        who: &str,
        did: &Did,
        component: &str,
        spec: &EvidenceSpec,
    ) -> Result<ClaimEvidence, ScenarioError> {
        let claimant = self.address(who);
        let msg = claim_message(did, component, &claimant, &self.chain_id());
        Ok(match spec {
            EvidenceSpec::Direct => {
                let kp = self.keypair(who);
                ClaimEvidence::DirectSig {
                    signature: schnorr::sign(&kp, &msg, &mut self.nonces(who, b"claim")),
                    public_key: kp.public,
                }
            }
            EvidenceSpec::Pedersen { m, r } => ClaimEvidence::PedersenOpening {
                m: Scalar::from_u64(*m),
                r: Scalar::from_u64(*r),
            },
            EvidenceSpec::Aggregate { signers } => {
                let members: Vec<_> = signers
                    .iter()
                    .map(|n| {
                        let kp = self.keypair(n);
                        (
                            schnorr::sign(&kp, &msg, &mut self.nonces(n, b"claim")),
                            kp.public,
                        )
                    })
                    .collect();
                let aggregate = schnorr::aggregate::<Ristretto>(
                    &members,
                    &msg,
                    &self.network.home.key_registry,
                )
                .map_err(|e| ScenarioError::Chain(e.into()))?;
                ClaimEvidence::Aggregate { aggregate }
            }
            EvidenceSpec::Knowledge { key } => ClaimEvidence::KnowledgeProof {
                proof: dlog::prove(
                    &self.keypair(key),
                    &msg,
                    &mut self.nonces(key, b"knowledge"),
                ),
            },
            EvidenceSpec::SignatureReveal { key } => ClaimEvidence::SignatureReveal {
                signature: self.signature_proof(key),
            },
            EvidenceSpec::Raw { evidence } => evidence.clone(),
        })
    }

    fn file_entry(&self, file: &str, chunk: usize) -> Result<(String, u32), ScenarioError> {
        let map = self
            .network
            .home
            .vault
            .chunk_map(file)
            .map_err(|e| ScenarioError::Chain(e.into()))?;
        let e = map
            .entries
            .get(chunk)
            .ok_or_else(|| ScenarioError::input(format!("file has no chunk {chunk}")))?;
        Ok((e.contract.clone(), e.index))
    }

    /// Executes one step and returns a short description of what happened.
    pub fn apply(&mut self, step: &Step, label: &str) -> Result<String, ScenarioError> {
        let native = || NATIVE_DENOM.to_string();
        match step {
            Step::CreateWill {
                who,
                bind,
                will,
                deeds,
            } => {
                let mut will = will.clone();
                for d in deeds {
                    let spec = will.components.get_mut(d.component).ok_or_else(|| {
                        ScenarioError::input(format!(
                            "deed targets missing component {}",
                            d.component
                        ))
                    })?;
                    let mut rng =
                        ChaCha20Rng::from_seed(derive(self.seed, &[b"deed", label.as_bytes()]));
                    let beneficiary = self.keypair(&d.beneficiary).public;
                    let temporary = self.keypair(&d.temporary).public;
                    self.network.home.store_deed(
                        d.content.as_bytes(),
                        &beneficiary,
                        &temporary,
                        spec,
                        &mut rng,
                    )?;
                }
                let creator = self.keypair(who).public;
                let nonce = self
                    .network
                    .home
                    .will_nonces
                    .get(&Address::from_public_key(&creator))
                    .copied()
                    .unwrap_or(0);
                self.submit(who, TxBody::CreateWill { will })?;
                let did = Did::derive(&creator, nonce);
                self.vars.insert(bind.clone(), did.to_string());
                Ok(did.to_string())
            }
            Step::Checkin { who, will } => {
                self.submit(who, TxBody::Checkin { did: will.clone() })?;
                Ok(format!(
                    "expiration {}",
                    self.network.home.will(will)?.expiration
                ))
            }
            Step::Claim {
                who,
                will,
                component,
                evidence,
            } => {
                let evidence = self.evidence(who, will, component, evidence)?;
                let burned = self.network.home.burned;
                self.submit(
                    who,
                    TxBody::Claim {
                        did: will.clone(),
                        component: component.clone(),
                        evidence,
                    },
                )?;
                let state = self
                    .network
                    .home
                    .will(will)?
                    .component(component)
                    .map(|c| c.state);
                Ok(format!(
                    "component {component} {:?}, burned {}",
                    state.expect("component exists"),
                    self.network.home.burned - burned
                ))
            }
            Step::Transfer {
                who,
                to,
                amount,
                denom,
            } => {
                self.submit(
                    who,
                    TxBody::Transfer {
                        to: *to,
                        amount: *amount,
                        denom: denom.clone().unwrap_or_else(native),
                    },
                )?;
                Ok(format!("{amount} to {to}"))
            }
            Step::Approve {
                who,
                chain_id,
                address,
            } => {
                self.submit(
                    who,
                    TxBody::ApproveContract {
                        chain_id: chain_id.clone(),
                        address: address.clone(),
                    },
                )?;
                Ok(format!("{address} on {chain_id}"))
            }
            Step::RegisterKey { who } => {
                let proof = self
                    .keypair(who)
                    .possession_proof(&mut self.nonces(who, b"pop"));
                self.submit(who, TxBody::RegisterKey { proof })?;
                Ok(format!("registered {}", self.address(who)))
            }
            Step::RftClaim { who, will } => {
                let addr = self.address(who);
                let before = self.network.home.native_balance(&addr);
                self.submit(who, TxBody::RftClaim { did: will.clone() })?;
                Ok(format!(
                    "payout {}",
                    self.network.home.native_balance(&addr) - before
                ))
            }
            Step::Noop { who } => {
                self.submit(who, TxBody::Noop)?;
                Ok(String::new())
            }
            Step::Advance { blocks } => {
                let out = self.network.advance(*blocks);
                Ok(format!(
                    "height {}, {} outputs",
                    self.network.home.height,
                    out.len()
                ))
            }
            Step::AdvanceTo { height } => {
                let now = self.network.home.height;
                if *height < now {
                    return Err(ScenarioError::input(format!(
                        "cannot go back from height {now} to {height}"
                    )));
                }
                let out = self.network.advance(height - now);
                Ok(format!(
                    "height {}, {} outputs",
                    self.network.home.height,
                    out.len()
                ))
            }
            Step::Relay { steps } => {
                let (rounds, accepted) = match steps {
                    Some(n) => (
                        *n,
                        (0..*n).map(|_| self.network.relay_step()).sum::<usize>(),
                    ),
                    None => {
                        let before = self.network.trace.len();
                        let n = self.network.relay_until_quiet(1000);
                        let accepted = self.network.trace[before..]
                            .iter()
                            .filter(|t| {
                                !t.outcome.starts_with("dropped")
                                    && !t.outcome.starts_with("rejected")
                            })
                            .count();
                        (n, accepted)
                    }
                };
                Ok(format!("{rounds} rounds, {accepted} accepted"))
            }
            Step::StoreFile {
                bind,
                content,
                size,
                chunk_size,
            } => {
                let bytes = match (content, size) {
                    (Some(c), _) => c.as_bytes().to_vec(),
                    (None, Some(n)) => {
                        let mut rng =
                            ChaCha20Rng::from_seed(derive(self.seed, &[b"file", label.as_bytes()]));
                        let mut b = vec![0u8; *n];
                        rng.fill_bytes(&mut b);
                        b
                    }
                    (None, None) => {
                        return Err(ScenarioError::input("store_file needs content or size"))
                    }
                };
                let map = self.network.home.store_file(&bytes, *chunk_size)?;
                self.vars.insert(bind.clone(), map.file_id_hex());
                Ok(format!(
                    "{} in {} chunks",
                    map.file_id_hex(),
                    map.entries.len()
                ))
            }
            Step::RetrieveFile {
                file,
                expect_content,
            } => {
                let bytes = self.network.home.retrieve_file(file)?;
                if let Some(want) = expect_content {
                    if bytes != want.as_bytes() {
                        return Err(ScenarioError::Assertion("retrieved content differs".into()));
                    }
                }
                Ok(format!(
                    "{} bytes, sha256 {}",
                    bytes.len(),
                    hex::encode(sha256(&bytes))
                ))
            }
            Step::TamperCell {
                file,
                chunk,
                offset,
            } => {
                let (contract, index) = self.file_entry(file, *chunk)?;
                if !self
                    .network
                    .home
                    .vault
                    .tamper_cell(&contract, index, *offset, 0x01)
                {
                    return Err(ScenarioError::input(format!(
                        "no byte {offset} in {contract}[{index}]"
                    )));
                }
                Ok(format!("{contract}[{index}]"))
            }
            Step::DeleteCell { file, chunk } => {
                let (contract, index) = self.file_entry(file, *chunk)?;
                self.network.home.vault.delete_cell(&contract, index);
                Ok(format!("{contract}[{index}]"))
            }
            Step::RevealKey {
                will,
                component,
                temporary,
            } => {
                let sk = *self.keypair(temporary).secret();
                let inner = self.network.home.reveal_key(will, component, &sk)?;
                Ok(format!("inner layer of {} bytes published", inner.len()))
            }
            Step::Repeat { .. } => Err(ScenarioError::input(
                "nested repeat must be given as raw steps",
            )),
            Step::Expect(check) => {
                self.check(check)?;
                let name = serde_json::to_value(check).ok();
                Ok(name
                    .as_ref()
                    .and_then(|v| v.get("check"))
                    .and_then(Value::as_str)
                    .unwrap_or("check")
                    .to_string())
            }
        }
    }

    fn check(&self, check: &Check) -> Result<(), ScenarioError> {
        let home = &self.network.home;
        let eq = |what: &str, got: String, want: String| {
            if got == want {
                Ok(())
            } else {
                Err(ScenarioError::Assertion(format!(
                    "{what}: expected {want}, got {got}"
                )))
            }
        };
        let dest = |chain: &str| {
            self.network
                .destination(chain)
                .ok_or_else(|| ScenarioError::input(format!("unknown chain {chain}")))
        };
        match check {
            Check::Balance {
                account,
                denom,
                equals,
            } => {
                let denom = denom
                    .clone()
                    .unwrap_or_else(|| home.params.native_denom.clone());
                eq(
                    &format!("balance of {account}"),
                    home.balance(account, &denom).to_string(),
                    equals.to_string(),
                )
            }
            Check::DestinationBalance {
                chain,
                address,
                denom,
                equals,
            } => eq(
                &format!("balance of {address} on {chain}"),
                dest(chain)?.balance(address, denom).to_string(),
                equals.to_string(),
            ),
            Check::DestinationEscrow {
                chain,
                denom,
                equals,
            } => eq(
                &format!("escrow on {chain}"),
                dest(chain)?
                    .contract
                    .escrow
                    .get(denom)
                    .copied()
                    .unwrap_or(0)
                    .to_string(),
                equals.to_string(),
            ),
            Check::ComponentState {
                will,
                component,
                state,
            } => {
                let got = home
                    .will(will)?
                    .component(component)
                    .ok_or_else(|| ScenarioError::input(format!("unknown component {component}")))?
                    .state;
                eq(
                    &format!("state of {component}"),
                    format!("{got:?}"),
                    format!("{state:?}"),
                )
            }
            Check::WillStatus { will, status } => eq(
                "will status",
                format!("{:?}", home.will(will)?.status),
                format!("{status:?}"),
            ),
            Check::Expiration { will, equals } => eq(
                "expiration",
                home.will(will)?.expiration.to_string(),
                equals.to_string(),
            ),
            Check::Height { equals } => eq("height", home.height.to_string(), equals.to_string()),
            Check::Burned { equals } => eq("burned", home.burned.to_string(), equals.to_string()),
            Check::Conserved => eq(
                "native supply",
                home.native_accounted().to_string(),
                home.genesis_supply.to_string(),
            ),
            Check::EventCount {
                kind,
                chain,
                attrs,
                equals,
            } => {
                let events = match chain {
                    Some(c) if *c != home.chain_id => &dest(c)?.events,
                    _ => &home.events,
                };
                let n = events
                    .iter()
                    .filter(|e| {
                        e.kind == *kind && attrs.iter().all(|(k, v)| e.attr(k) == Some(v.as_str()))
                    })
                    .count();
                eq(
                    &format!("count of {kind} events"),
                    n.to_string(),
                    equals.to_string(),
                )
            }
            Check::EventHeight {
                kind,
                attrs,
                equals,
            } => {
                let hits: Vec<u64> = home
                    .events
                    .iter()
                    .filter(|e| {
                        e.kind == *kind && attrs.iter().all(|(k, v)| e.attr(k) == Some(v.as_str()))
                    })
                    .map(|e| e.height)
                    .collect();
                match hits.as_slice() {
                    [h] => eq(
                        &format!("height of {kind}"),
                        h.to_string(),
                        equals.to_string(),
                    ),
                    _ => Err(ScenarioError::Assertion(format!(
                        "expected one {kind} event, found {}",
                        hits.len()
                    ))),
                }
            }
            Check::Outputs { will, expect } => {
                let w = home.will(will)?;
                let mut log = home.output_log(will);
                // listed in component order; outputs of one component keep
                // the order they were produced in
                log.sort_by_key(|e| w.component_index(&e.component).unwrap_or(usize::MAX));
                eq(
                    "outputs",
                    codec::to_canonical(&log).expect("outputs serialize"),
                    codec::to_canonical(expect).expect("outputs serialize"),
                )
            }
            Check::TokenOwner { will, owner } => {
                let token = home
                    .tokens
                    .get(will)
                    .ok_or_else(|| ScenarioError::input(format!("no token for {will}")))?;
                eq("token owner", token.owner().to_string(), owner.to_string())
            }
            Check::DeedRecovered {
                will,
                component,
                beneficiary,
                equals,
            } => {
                let inner = home
                    .events
                    .iter()
                    .rev()
                    .find(|e| {
                        e.kind == "key_revealed"
                            && e.attr("did") == Some(will.as_str())
                            && e.attr("component") == Some(component.as_str())
                    })
                    .and_then(|e| e.attr("inner"))
                    .ok_or_else(|| {
                        ScenarioError::Assertion(format!("no key revealed for {component}"))
                    })?;
                let inner =
                    hex::decode(inner).map_err(|e| ScenarioError::Assertion(e.to_string()))?;
                let plain =
                    layered_decrypt_inner::<Ristretto>(&inner, self.keypair(beneficiary).secret())
                        .map_err(|e| {
                            ScenarioError::Assertion(format!("beneficiary cannot open deed: {e}"))
                        })?;
                eq(
                    "deed",
                    String::from_utf8_lossy(&plain).into_owned(),
                    equals.clone(),
                )
            }
            Check::CommitmentSoundness => {
                for t in &self.network.trace {
                    if t.outcome.starts_with("dropped") || t.outcome.starts_with("rejected") {
                        continue;
                    }
                    let key = packet_key(&t.path.channel, t.phase, t.sequence);
                    let store = if t.path.source_chain == home.chain_id {
                        &home.packets
                    } else {
                        &dest(&t.path.source_chain)?.packets
                    };
                    if store.commitments.get(&key) != Some(&t.commitment) {
                        return Err(ScenarioError::Assertion(format!(
                            "delivered {key} has no source commitment"
                        )));
                    }
                }
                Ok(())
            }
            Check::TraceCount {
                outcome,
                min,
                equals,
            } => {
                let n = self
                    .network
                    .trace
                    .iter()
                    .filter(|t| t.outcome.starts_with(outcome.as_str()))
                    .count() as u64;
                if let Some(m) = min {
                    if n < *m {
                        return Err(ScenarioError::Assertion(format!(
                            "expected at least {m} {outcome:?} deliveries, got {n}"
                        )));
                    }
                }
                if let Some(e) = equals {
                    eq(
                        &format!("{outcome:?} deliveries"),
                        n.to_string(),
                        e.to_string(),
                    )?;
                }
                Ok(())
            }
        }
    }
}

/// A saved session with the state hash of every chain for integrity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Snapshot {
    pub state_hashes: BTreeMap<String, String>,
    pub session: Session,
}

impl Snapshot {
    pub fn capture(session: &Session) -> Self {
        Snapshot {
            state_hashes: session.network.chain_hashes(),
            session: session.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        codec::to_canonical_pretty(self).expect("snapshot serializes")
    }

    /// Parses a snapshot and checks its recorded hashes.
    pub fn from_text(text: &str) -> Result<Session, ScenarioError> {
        let snap: Snapshot = codec::from_text(text).map_err(input("snapshot"))?;
        let mut session = snap.session;
        session.network.restore();
        if session.network.chain_hashes() != snap.state_hashes {
            return Err(ScenarioError::input(
                "snapshot state does not match its recorded hashes",
            ));
        }
        Ok(session)
    }
}

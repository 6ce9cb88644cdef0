//! Checks shared by the acceptance binary and the property tests.
#![allow(dead_code)]

pub mod transitions;

use std::collections::{BTreeMap, BTreeSet};

use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar as DalekScalar;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use willchain_core::crypto::schnorr::{aggregate, aggregate_verify, sign};
use willchain_core::crypto::{
    Group, KeyPair, KeyRegistry, NonceSource, PedersenParams, Ristretto, Scalar, ScalarField,
    Toy101, ToyScalar,
};
use willchain_core::scenario::{self, bundled, Scenario, Session, BUNDLED};
use willchain_core::vault::{Vault, VaultError};
use willchain_core::will::{mint_rft, WillDraft};
use willchain_core::Address;

pub type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub fn random_scalar(rng: &mut impl RngCore) -> Scalar {
    let mut wide = [0u8; 64];
    rng.fill_bytes(&mut wide);
    Scalar::from_wide_bytes(&wide)
}

fn dalek_scalar(s: &Scalar) -> DalekScalar {
    let bytes: [u8; 32] = s.to_bytes().try_into().expect("32-byte scalar");
    DalekScalar::from_canonical_bytes(bytes).expect("canonical scalar")
}

fn dalek_point(bytes: &[u8]) -> RistrettoPoint {
    CompressedRistretto::from_slice(bytes)
        .expect("32 bytes")
        .decompress()
        .expect("valid point")
}

/// Commitments recomputed with curve25519-dalek directly, and the
/// homomorphism `C(m1,r1)·C(m2,r2) = C(m1+m2, r1+r2)`.
pub fn pedersen_homomorphism(trials: usize, seed: u64) -> Check {
    let params = PedersenParams::standard();
    let g = curve25519_dalek::constants::RISTRETTO_BASEPOINT_POINT;
    let h = dalek_point(&Ristretto::encode(&params.h));
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for i in 0..trials {
        let (m1, r1, m2, r2) = (
            random_scalar(&mut rng),
            random_scalar(&mut rng),
            random_scalar(&mut rng),
            random_scalar(&mut rng),
        );
        let c1 = params.commit(&m1, &r1);
        let c2 = params.commit(&m2, &r2);
        let oracle = g * dalek_scalar(&m1) + h * dalek_scalar(&r1);
        ensure!(
            dalek_point(&Ristretto::encode(&c1.point)) == oracle,
            "trial {i}: commitment differs from g*m + h*r"
        );
        ensure!(
            c1.combine(&c2) == params.commit(&(m1 + m2), &(r1 + r2)),
            "trial {i}: homomorphism fails"
        );
        ensure!(
            !params.verify_opening(&c1, &(m1 + Scalar::one()), &r1),
            "trial {i}: wrong opening accepted"
        );
    }
    Ok(format!("{trials} random triples"))
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Every commitment in the order-101 group against integer arithmetic mod
/// 607, perfect hiding (each commitment opens to every message exactly
/// once), and that any collision hands over `log_g h`.
pub fn toy_exhaustive() -> Check {
    const P: u64 = 607;
    const Q: u64 = 101;
    let params = willchain_core::crypto::pedersen::PedersenParams::<Toy101>::standard();
    let g = params.g.value() as u64;
    let h = params.h.value() as u64;
    ensure!(g != 1 && pow_mod(g, Q, P) == 1, "g does not have order 101");
    ensure!(h != 1 && pow_mod(h, Q, P) == 1, "h does not have order 101");
    let log_h = (0..Q)
        .find(|&x| pow_mod(g, x, P) == h)
        .ok_or("h outside <g>")?;

    let mut openings: BTreeMap<u64, Vec<(u64, u64)>> = BTreeMap::new();
    for m in 0..Q {
        for r in 0..Q {
            let c = params.commit(&ToyScalar::new(m as u32), &ToyScalar::new(r as u32));
            let oracle = pow_mod(g, m, P) * pow_mod(h, r, P) % P;
            ensure!(
                c.point.value() as u64 == oracle,
                "C({m},{r}) = {} not {oracle}",
                c.point.value()
            );
            openings.entry(oracle).or_default().push((m, r));
        }
    }
    ensure!(
        openings.len() == Q as usize,
        "{} distinct commitments",
        openings.len()
    );
    for (c, list) in &openings {
        let msgs: BTreeSet<u64> = list.iter().map(|(m, _)| *m).collect();
        ensure!(
            msgs.len() == Q as usize,
            "commitment {c} misses some message"
        );
        let (m0, r0) = list[0];
        for &(m1, r1) in &list[1..] {
            // m0 + x r0 = m1 + x r1  =>  x = (m0 - m1) / (r1 - r0)
            let num = (m0 + Q - m1) % Q;
            let den = (r1 + Q - r0) % Q;
            let x = num * pow_mod(den, Q - 2, Q) % Q;
            ensure!(
                x == log_h,
                "collision ({m0},{r0}) ({m1},{r1}) does not reveal log h"
            );
        }
    }
    Ok(format!("{} openings, log_g h = {log_h}", Q * Q))
}

/// Group arithmetic in `<g> ⊂ Z*_607` by repeated multiplication only.
struct ToyOracle {
    g_pow: Vec<u64>,
}

impl ToyOracle {
    const P: u64 = 607;

    fn new() -> Self {
        let g = Toy101::generator().value() as u64;
        let mut g_pow = vec![1u64];
        for _ in 1..101 {
            let last = *g_pow.last().unwrap();
            g_pow.push(last * g % Self::P);
        }
        ToyOracle { g_pow }
    }

    fn pow(base: u64, times: u32) -> u64 {
        (0..times).fold(1, |acc, _| acc * base % Self::P)
    }

    fn g(&self, e: ToyScalar) -> u64 {
        self.g_pow[e.value() as usize]
    }
}

/// In the order-101 group, exhaustively: Pedersen openings, Schnorr
/// signatures and discrete-log proofs are accepted exactly when the
/// verification equation holds under brute-force arithmetic, and random
/// aggregates (valid and corrupted) agree with the oracle.
pub fn toy_oracle(seed: u64) -> Check {
    use willchain_core::crypto::dlog::{self, DlogProof};
    use willchain_core::crypto::schnorr::{self, SchnorrSignature};
    use willchain_core::crypto::ToyElement;

    let o = ToyOracle::new();
    let params = willchain_core::crypto::pedersen::PedersenParams::<Toy101>::standard();
    let h = params.h.value() as u64;
    let elements: Vec<ToyElement> = ToyElement::all().collect();
    let mut checks = 0u64;
    let mut mismatches = Vec::new();

    // Pedersen: (c, m, r) for every commitment and opening.
    let h_pow: Vec<u64> = (0..101).map(|r| ToyOracle::pow(h, r)).collect();
    for c in &params_commitments(&elements) {
        for m in ToyScalar::all() {
            for r in ToyScalar::all() {
                let want =
                    o.g(m) * h_pow[r.value() as usize] % ToyOracle::P == c.point.value() as u64;
                if params.verify_opening(c, &m, &r) != want {
                    mismatches.push(format!("pedersen c={} m={m:?} r={r:?}", c.point.value()));
                }
                checks += 1;
            }
        }
    }

    // Schnorr and dlog: every (R, s) against one key, message and context.
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let x = ToyScalar::new(rng.gen_range(1..101));
    let kp = schnorr::KeyPair::<Toy101>::from_secret(x).map_err(|e| e.to_string())?;
    let pk = kp.public.value() as u64;
    let msg = b"toy message";
    for r_el in &elements {
        let c = schnorr::challenge::<Toy101>(r_el, &kp.public, msg);
        let rhs = r_el.value() as u64 * ToyOracle::pow(pk, c.value()) % ToyOracle::P;
        let cd = dlog::challenge::<Toy101>(r_el, &kp.public, msg);
        let rhs_d = r_el.value() as u64 * ToyOracle::pow(pk, cd.value()) % ToyOracle::P;
        for s in ToyScalar::all() {
            let sig = SchnorrSignature::<Toy101> {
                nonce_point: *r_el,
                response: s,
            };
            if schnorr::verify::<Toy101>(&kp.public, msg, &sig) != (o.g(s) == rhs) {
                mismatches.push(format!("schnorr R={} s={s:?}", r_el.value()));
            }
            let proof = DlogProof::<Toy101> {
                commitment: *r_el,
                response: s,
            };
            if dlog::verify::<Toy101>(&kp.public, msg, &proof) != (o.g(s) == rhs_d) {
                mismatches.push(format!("dlog R={} s={s:?}", r_el.value()));
            }
            checks += 2;
        }
    }
    let mut nonces = NonceSource::from_u64(seed);
    for x in 1..101u32 {
        let kp = schnorr::KeyPair::<Toy101>::from_secret(ToyScalar::new(x))
            .map_err(|e| e.to_string())?;
        let sig = sign(&kp, msg, &mut nonces);
        if !schnorr::verify::<Toy101>(&kp.public, msg, &sig) {
            mismatches.push(format!("honest signature by {x} rejected"));
        }
        checks += 1;
    }

    // Aggregates: oracle is g^Σs = Π R_i · P_i^c_i.
    for trial in 0..300 {
        let n = rng.gen_range(1..=5);
        let mut registry = schnorr::KeyRegistry::<Toy101>::new();
        let keys: Vec<_> = (0..n)
            .map(|_| {
                schnorr::KeyPair::<Toy101>::from_secret(ToyScalar::new(rng.gen_range(1..101)))
                    .unwrap()
            })
            .collect();
        for k in &keys {
            let _ = registry.register(&k.public, &k.possession_proof(&mut nonces));
        }
        let members: Vec<_> = keys
            .iter()
            .map(|k| (sign(k, msg, &mut nonces), k.public))
            .collect();
        let mut agg = aggregate(&members, msg, &registry).map_err(|e| e.to_string())?;
        if trial % 2 == 1 {
            agg.response_sum = agg.response_sum + ToyScalar::new(rng.gen_range(0..101));
        }
        let rhs = agg
            .nonce_points
            .iter()
            .zip(&agg.signer_pks)
            .fold(1u64, |acc, (r, p)| {
                let c = schnorr::challenge::<Toy101>(r, p, msg);
                acc * (r.value() as u64) % ToyOracle::P
                    * ToyOracle::pow(p.value() as u64, c.value())
                    % ToyOracle::P
            });
        let want = o.g(agg.response_sum) == rhs;
        if aggregate_verify(&agg, msg).unwrap_or(false) != want {
            mismatches.push(format!("aggregate trial {trial}"));
        }
        checks += 1;
    }

    ensure!(
        mismatches.is_empty(),
        "{} mismatches, first: {}",
        mismatches.len(),
        mismatches[0]
    );
    Ok(format!("{checks} comparisons, zero mismatches"))
}

fn params_commitments(
    elements: &[willchain_core::crypto::ToyElement],
) -> Vec<willchain_core::crypto::pedersen::Commitment<Toy101>> {
    elements
        .iter()
        .map(|e| willchain_core::crypto::pedersen::Commitment { point: *e })
        .collect()
}

/// `trials` aggregates with signer counts cycling through 1..=max_n. Each
/// trial checks the honest aggregate, then corrupts one member: the
/// aggregate must verify exactly when every member verifies on its own.
/// A changed message, a dropped signer and an unregistered key are caught.
pub fn aggregation(max_n: usize, trials: usize, seed: u64) -> Check {
    use willchain_core::crypto::schnorr::{verify, AggregateSignature};

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut nonces = NonceSource::from_u64(seed);
    for t in 0..trials {
        let n = t % max_n + 1;
        let mut registry = KeyRegistry::new();
        let keys: Vec<KeyPair> = (0..n)
            .map(|_| KeyPair::from_seed(&rng.gen::<[u8; 32]>()))
            .collect();
        for k in &keys {
            registry
                .register(&k.public, &k.possession_proof(&mut nonces))
                .map_err(|e| e.to_string())?;
        }
        let msg: [u8; 32] = rng.gen();
        let mut members: Vec<_> = keys
            .iter()
            .map(|k| (sign(k, &msg, &mut nonces), k.public))
            .collect();
        let all_verify = |m: &[(willchain_core::crypto::SchnorrSignature, _)]| {
            m.iter().all(|(s, pk)| verify::<Ristretto>(pk, &msg, s))
        };
        ensure!(all_verify(&members), "n={n} t={t}: honest member fails");
        let agg = aggregate(&members, &msg, &registry).map_err(|e| format!("n={n} t={t}: {e}"))?;
        ensure!(
            aggregate_verify(&agg, &msg) == Ok(true),
            "n={n} t={t}: valid aggregate rejected"
        );

        let mut other = msg;
        other[0] ^= 1;
        ensure!(
            aggregate_verify(&agg, &other) != Ok(true),
            "n={n} t={t}: accepted for another message"
        );
        if n > 1 {
            let mut short = agg.clone();
            short.signer_pks.pop();
            short.nonce_points.pop();
            ensure!(
                aggregate_verify(&short, &msg) != Ok(true),
                "n={n} t={t}: dropped signer accepted"
            );
        }
        let rogue = KeyPair::from_seed(&rng.gen::<[u8; 32]>());
        let mut with_rogue = members.clone();
        with_rogue.push((sign(&rogue, &msg, &mut nonces), rogue.public));
        ensure!(
            aggregate(&with_rogue, &msg, &registry).is_err(),
            "n={n} t={t}: unregistered key aggregated"
        );

        let bad = rng.gen_range(0..n);
        members[bad].0.response = members[bad].0.response + random_scalar(&mut rng);
        ensure!(
            !all_verify(&members),
            "n={n} t={t}: corruption went unnoticed by the oracle"
        );
        match aggregate(&members, &msg, &registry) {
            Err(willchain_core::crypto::CryptoError::AggregationRejected { index, .. })
                if index == bad => {}
            other => {
                return Err(format!(
                    "n={n} t={t}: corrupted member {bad} gave {other:?}"
                ))
            }
        }
        let forced = AggregateSignature::<Ristretto> {
            nonce_points: members.iter().map(|(s, _)| s.nonce_point).collect(),
            response_sum: members
                .iter()
                .fold(Scalar::zero(), |acc, (s, _)| acc + s.response),
            signer_pks: members.iter().map(|(_, pk)| *pk).collect(),
        };
        ensure!(
            aggregate_verify(&forced, &msg) == Ok(false),
            "n={n} t={t}: aggregate with corrupted member verified"
        );
    }
    Ok(format!(
        "{trials} trials, n = 1..={max_n}, one corrupted member each"
    ))
}

/// Runs a bundled scenario and requires every step to pass.
pub fn bundled_passes(name: &str) -> Check {
    let s = bundled(name).ok_or_else(|| format!("no bundled scenario {name}"))?;
    let out = scenario::run_scenario(&s, None, None).map_err(|e| e.to_string())?;
    match &out.failure {
        None => Ok(format!("{} steps", out.records.len())),
        Some((step, e)) => Err(format!("step {step}: {e}")),
    }
}

/// Runs every bundled scenario twice and compares reports byte for byte.
pub fn bundled_determinism() -> Check {
    for (name, _) in BUNDLED {
        let s = bundled(name).expect("listed");
        let a = scenario::run_scenario(&s, None, None).map_err(|e| e.to_string())?;
        let b = scenario::run_scenario(&s, None, None).map_err(|e| e.to_string())?;
        ensure!(a.report() == b.report(), "{name}: reports differ");
        ensure!(
            a.session.network.network_hash() == b.session.network.network_hash(),
            "{name}: network hashes differ"
        );
    }
    Ok(format!("{} scenarios", BUNDLED.len()))
}

pub fn start(scenario: Value, seed: u64) -> Result<Session, String> {
    let s: Scenario = serde_json::from_value(scenario).map_err(|e| e.to_string())?;
    Session::start(&s, None, seed).map_err(|e| e.to_string())
}

pub fn run_steps(session: &mut Session, steps: &[Value]) -> Result<(), String> {
    let mut records = Vec::new();
    for (i, s) in steps.iter().enumerate() {
        session
            .run_raw(s, &i.to_string(), &mut records)
            .map_err(|e| format!("step {i}: {e}"))?;
    }
    Ok(())
}

const RANDOM_ACCOUNTS: [&str; 5] = ["a0", "a1", "a2", "a3", "a4"];

/// Totals from a randomized run.
#[derive(Debug, Default)]
pub struct RandomStats {
    pub txs: usize,
    pub rejected: usize,
    pub blocks: u64,
    pub burned: u64,
}

fn random_will(rng: &mut ChaCha20Rng, height: u64) -> Value {
    let pick = |rng: &mut ChaCha20Rng| format!("@{}", RANDOM_ACCOUNTS[rng.gen_range(0..5)]);
    let heir = pick(rng);
    let claimer = pick(rng);
    let mut will = json!({
        "expiration": height + rng.gen_range(1..40),
        "claim_window": rng.gen_range(1..20),
        "beneficiaries": [heir, claimer],
        "components": [
            {"type": "transfer", "access": {"visibility": "public"},
             "output": {"kind": "transfer", "to": heir, "amount": rng.gen_range(0..500_000), "denom": "uwill"}},
            {"type": "direct+transfer", "access": {"visibility": "private", "allowed": [claimer]},
             "output": {"kind": "transfer", "to": claimer, "amount": rng.gen_range(1..300_000), "denom": "uwill"},
             "requirement": {"claim_type": "direct",
                             "expected": {"kind": "beneficiary_address", "address": claimer},
                             "access": {"visibility": "private", "allowed": [claimer]}}}
        ]
    });
    if rng.gen_bool(0.5) {
        let (a, b) = (pick(rng), pick(rng));
        let mut shares = serde_json::Map::new();
        shares.insert(a, json!(rng.gen_range(1..100)));
        shares.insert(b, json!(rng.gen_range(1..100)));
        will["shares"] = Value::Object(shares);
        will["rft_escrow"] = json!(rng.gen_range(0..200_000));
    }
    will
}

/// `txs` random transactions interleaved with blocks. After every block
/// and every transaction the native supply must be conserved, and a
/// rejected transaction must leave the chain untouched.
pub fn random_run(seed: u64, txs: usize) -> Result<RandomStats, String> {
    let accounts: Vec<Value> = RANDOM_ACCOUNTS
        .iter()
        .map(|n| json!({"name": n, "balances": {"uwill": 20_000_000u64}}))
        .collect();
    let mut session = start(json!({"accounts": accounts}), seed)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5eed);
    let mut wills: Vec<String> = Vec::new();
    let mut stats = RandomStats::default();
    let mut records = Vec::new();
    while stats.txs < txs {
        let who = RANDOM_ACCOUNTS[rng.gen_range(0..5)];
        let will = |rng: &mut ChaCha20Rng| {
            if wills.is_empty() {
                "did:will:00".to_string()
            } else {
                format!("${}", wills[rng.gen_range(0..wills.len())])
            }
        };
        let roll = rng.gen_range(0..100);
        if roll < 12 {
            for _ in 0..rng.gen_range(1..=3) {
                session
                    .run_raw(
                        &json!({"op": "advance", "blocks": 1}),
                        "block",
                        &mut records,
                    )
                    .map_err(|e| e.to_string())?;
                stats.blocks += 1;
                let home = &session.network.home;
                ensure!(
                    home.conserves_supply(),
                    "block {}: accounted {} != supply {}",
                    home.height,
                    home.native_accounted(),
                    home.genesis_supply
                );
            }
            continue;
        }
        let height = session.network.home.height;
        let step = match roll {
            12..=34 => {
                let to = RANDOM_ACCOUNTS[rng.gen_range(0..5)];
                let amount = if rng.gen_bool(0.1) {
                    u64::MAX / 2
                } else {
                    rng.gen_range(0..2_000_000)
                };
                json!({"op": "transfer", "who": who, "to": format!("@{to}"), "amount": amount})
            }
            35..=54 => {
                let bind = format!("w{}", stats.txs);
                let w = random_will(&mut rng, height);
                let step = json!({"op": "create_will", "who": who, "as": bind, "will": w});
                wills.push(bind);
                step
            }
            55..=66 => json!({"op": "checkin", "who": who, "will": will(&mut rng)}),
            67..=88 => {
                let component = if rng.gen_bool(0.85) { "c1" } else { "c0" };
                json!({"op": "claim", "who": who, "will": will(&mut rng), "component": component,
                       "evidence": {"kind": "direct"}})
            }
            89..=96 => json!({"op": "rft_claim", "who": who, "will": will(&mut rng)}),
            _ => json!({"op": "noop", "who": who}),
        };
        let before = session.network.home.clone();
        let result = session.run_raw(&step, "tx", &mut records);
        if result.is_err() {
            stats.rejected += 1;
            if let Some(Value::String(bind)) = step.get("as") {
                if !session.vars.contains_key(bind) {
                    wills.pop();
                }
            }
            ensure!(
                session.network.home == before,
                "rejected {} changed state",
                step["op"]
            );
        }
        stats.txs += 1;
        let home = &session.network.home;
        ensure!(
            home.conserves_supply(),
            "after {}: accounted {} != supply {}",
            step["op"],
            home.native_accounted(),
            home.genesis_supply
        );
    }
    stats.burned = session.network.home.burned;
    Ok(stats)
}

/// Interchain run with an early claim, an execution send, an eligible
/// claim, a send the escrow cannot cover, and three relayers racing.
pub fn interchain_scenario() -> Value {
    json!({
        "accounts": [
            {"name": "creator", "balances": {"uwill": 1000000}},
            {"name": "heir", "balances": {"uwill": 3000000}}
        ],
        "topology": {
            "destinations": [{"chain_id": "dest-1", "entrypoint": "0xentry", "escrow": {"uatom": 5000}}],
            "channels": [{"channel": "channel-0", "destination_chain": "dest-1"}],
            "relayers": [{"id": "r-a"}, {"id": "r-b"}, {"id": "r-c", "channels": ["channel-0"]}]
        },
        "steps": [
            {"op": "approve", "who": "creator", "chain_id": "dest-1", "address": "0xentry"},
            {"op": "create_will", "who": "creator", "as": "w", "will": {
                "expiration": 50,
                "beneficiaries": ["@heir"],
                "components": [
                    {"type": "direct+ibc-send", "access": {"visibility": "public"},
                     "output": {"kind": "ibc_send", "channel": "channel-0", "address": "@heir", "amount": 700, "denom": "uatom"},
                     "requirement": {"claim_type": "direct",
                                     "expected": {"kind": "beneficiary_address", "address": "@heir"},
                                     "access": {"visibility": "public"}}},
                    {"type": "ibc-msg+ibc-send", "access": {"visibility": "public"},
                     "output": {"kind": "ibc_send", "channel": "channel-0", "address": "@heir", "amount": 300, "denom": "uatom"}},
                    {"type": "ibc-msg+ibc-send", "access": {"visibility": "public"},
                     "output": {"kind": "ibc_send", "channel": "channel-0", "address": "@heir", "amount": 90000, "denom": "uatom"}}
                ]
            }},
            {"op": "advance", "blocks": 5},
            {"op": "claim", "who": "heir", "will": "$w", "component": "c0", "evidence": {"kind": "direct"}},
            {"op": "relay"},
            {"op": "advance_to", "height": 50},
            {"op": "claim", "who": "heir", "will": "$w", "component": "c0", "evidence": {"kind": "direct"}},
            {"op": "relay"},
            {"op": "relay"}
        ]
    })
}

/// One relayer ordering of [`interchain_scenario`]: logic runs exactly
/// once per eligible component, never after an early or ineligible
/// verdict, and duplicate deliveries bounce.
pub fn relay_ordering(relay_seed: u64) -> Check {
    let scenario = interchain_scenario();
    let mut session = start(scenario.clone(), 3)?;
    session.network.seed = relay_seed;
    let steps = scenario["steps"].as_array().expect("steps").clone();
    run_steps(&mut session, &steps)?;
    let net = &session.network;
    let dest = net.destination("dest-1").ok_or("no dest-1")?;

    let mut verdicts: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    for e in net
        .home
        .events
        .iter()
        .filter(|e| e.kind == "handshake_verdict")
    {
        verdicts
            .entry((
                e.attr("did").unwrap_or_default().to_string(),
                e.attr("component").unwrap_or_default().to_string(),
            ))
            .or_default()
            .push(e.attr("verdict").unwrap_or_default().to_string());
    }
    let mut released: BTreeMap<(String, String), usize> = BTreeMap::new();
    for e in dest.events.iter().filter(|e| e.kind == "entrypoint") {
        if e.attr("outcome") == Some("released") {
            *released
                .entry((
                    e.attr("did").unwrap_or_default().to_string(),
                    e.attr("component").unwrap_or_default().to_string(),
                ))
                .or_default() += 1;
        }
    }
    for (key, n) in &released {
        ensure!(*n == 1, "seed {relay_seed}: {key:?} released {n} times");
        let v = verdicts.get(key).cloned().unwrap_or_default();
        ensure!(
            v.iter().filter(|s| *s == "eligible").count() == 1,
            "seed {relay_seed}: {key:?} released with verdicts {v:?}"
        );
    }
    for (key, v) in &verdicts {
        if !v.iter().any(|s| s == "eligible") {
            ensure!(
                !released.contains_key(key),
                "seed {relay_seed}: {key:?} released after {v:?}"
            );
        }
    }
    let all: Vec<&String> = verdicts.values().flatten().collect();
    let count = |s: &str| all.iter().filter(|v| v.as_str() == s).count();
    ensure!(
        count("early") == 1 && count("eligible") == 2 && count("ineligible") == 1,
        "seed {relay_seed}: verdicts {all:?}"
    );
    ensure!(
        released.len() == 2,
        "seed {relay_seed}: {} releases",
        released.len()
    );
    ensure!(
        dest.contract.escrow.get("uatom") == Some(&4000),
        "seed {relay_seed}: escrow {:?}",
        dest.contract.escrow
    );
    ensure!(
        dest.balance(&session.address("heir").to_string(), "uatom") == 1000,
        "seed {relay_seed}: heir holds {}",
        dest.balance(&session.address("heir").to_string(), "uatom")
    );
    ensure!(
        net.home.burned == net.home.params.penalty_amount,
        "seed {relay_seed}: burned {}",
        net.home.burned
    );
    ensure!(
        net.home.conserves_supply(),
        "seed {relay_seed}: supply not conserved"
    );

    let mut deliveries: BTreeMap<(String, u64, String), (usize, usize)> = BTreeMap::new();
    for t in &net.trace {
        let key = (
            t.path.channel.clone() + &t.path.destination_chain,
            t.sequence,
            t.phase.to_string(),
        );
        let slot = deliveries.entry(key).or_default();
        if t.outcome.starts_with("accepted") || t.outcome.starts_with("verdict") {
            slot.0 += 1;
        } else {
            ensure!(
                t.outcome.starts_with("rejected"),
                "seed {relay_seed}: odd outcome {}",
                t.outcome
            );
            slot.1 += 1;
        }
    }
    let dupes: usize = deliveries.values().map(|d| d.1).sum();
    for (key, (ok, _)) in &deliveries {
        ensure!(*ok == 1, "seed {relay_seed}: {key:?} accepted {ok} times");
    }
    ensure!(
        dupes > 0,
        "seed {relay_seed}: no duplicate deliveries to reject"
    );
    Ok(format!(
        "{} packets, {dupes} replays rejected",
        deliveries.len()
    ))
}

/// `payout = floor(E · s / S)` per heir, with the remainder as dust.
pub fn rft_split(shares: &[u64], escrow: u64) -> Result<(Vec<u64>, u64), String> {
    let creator = KeyPair::from_seed(b"rft-creator");
    let heirs: Vec<Address> = (0..shares.len())
        .map(|i| {
            Address::from_public_key(&KeyPair::from_seed(format!("heir-{i}").as_bytes()).public)
        })
        .collect();
    let component = serde_json::from_value(json!({
        "type": "transfer+emit", "access": {"visibility": "public"},
        "output": {"kind": "emit", "message": "x"}
    }))
    .map_err(|e| e.to_string())?;
    let draft = WillDraft {
        expiration: 1,
        components: vec![component],
        beneficiaries: heirs.clone(),
        claim_window: None,
    };
    let (will, _) = willchain_core::will::create_will(&creator.public, draft, 0, 0, |_| true)
        .map_err(|e| e.to_string())?;
    let map: BTreeMap<Address, u64> = heirs.iter().copied().zip(shares.iter().copied()).collect();
    let mut ledger = mint_rft(&will, &map, escrow).map_err(|e| e.to_string())?;
    let (expired, _) =
        willchain_core::will::execute_will(&will, 1, "c").map_err(|e| e.to_string())?;
    let dust = ledger.dust();
    let mut payouts = Vec::new();
    for h in &heirs {
        let (next, p) =
            willchain_core::will::rft_claim(&ledger, h, &expired).map_err(|e| e.to_string())?;
        ledger = next;
        payouts.push(p);
    }
    ensure!(
        ledger.escrow == dust,
        "left {} in escrow, dust was {dust}",
        ledger.escrow
    );
    Ok((payouts, dust))
}

/// Random files up to `max_len` bytes round-trip through a vault; chunk
/// maps name each file by its SHA-256.
pub fn vault_round_trips(files: usize, max_len: usize, seed: u64) -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut vault = Vault::new(4096, 64, usize::MAX);
    let mut stored = Vec::new();
    let mut bytes_total = 0;
    for i in 0..files {
        let len = match i {
            0 => 0,
            1 => max_len,
            _ => rng.gen_range(0..=max_len),
        };
        let mut file = vec![0u8; len];
        rng.fill_bytes(&mut file);
        let chunk = rng.gen_range(1..=4096);
        let map = vault
            .store_file(&file, chunk)
            .map_err(|e| format!("file {i}: {e}"))?;
        let digest: [u8; 32] = Sha256::digest(&file).into();
        ensure!(
            map.file_id == digest,
            "file {i}: id is not the SHA-256 of the content"
        );
        ensure!(
            map.entries.len() == len.div_ceil(chunk),
            "file {i}: {} chunks for {len}/{chunk}",
            map.entries.len()
        );
        bytes_total += len;
        stored.push((file, map));
    }
    for (i, (file, map)) in stored.iter().enumerate() {
        let back = vault
            .retrieve_file(map)
            .map_err(|e| format!("file {i}: {e}"))?;
        ensure!(back == *file, "file {i}: content differs");
    }
    Ok(format!("{files} files, {bytes_total} bytes"))
}

/// Flipping a byte of any chunk or deleting its cell is reported at that
/// chunk's position.
pub fn vault_tamper(seed: u64) -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for trial in 0..20 {
        let mut vault = Vault::new(4096, 64, usize::MAX);
        let mut file = vec![0u8; rng.gen_range(1..50_000)];
        rng.fill_bytes(&mut file);
        let map = vault
            .store_file(&file, rng.gen_range(1..=2048))
            .map_err(|e| e.to_string())?;
        let pos = rng.gen_range(0..map.entries.len());
        let e = map.entries[pos].clone();
        let mut tampered = vault.clone();
        let offset = rng.gen_range(0..e.len as usize);
        ensure!(
            tampered.tamper_cell(&e.contract, e.index, offset, rng.gen_range(1..=255)),
            "trial {trial}: no cell to tamper"
        );
        match tampered.retrieve_file(&map) {
            Err(VaultError::CorruptionDetected { position }) if position == pos => {}
            other => return Err(format!("trial {trial}: tamper at {pos} gave {other:?}")),
        }
        ensure!(
            vault.delete_cell(&e.contract, e.index),
            "trial {trial}: no cell to delete"
        );
        match vault.retrieve_file(&map) {
            Err(VaultError::ChunkMissing { position, .. }) if position == pos => {}
            other => return Err(format!("trial {trial}: deletion at {pos} gave {other:?}")),
        }
    }
    Ok("20 tampered and 20 deleted chunks located".into())
}

/// A deed opens only with the temporary key first and then the
/// beneficiary key; every other key or order fails authentication.
pub fn deed_layers(seed: u64) -> Check {
    use willchain_core::crypto::layered::{
        layered_decrypt_inner, layered_decrypt_outer, layered_encrypt,
    };

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for trial in 0..50 {
        let b = KeyPair::from_seed(&rng.gen::<[u8; 32]>());
        let t = KeyPair::from_seed(&rng.gen::<[u8; 32]>());
        let other = KeyPair::from_seed(&rng.gen::<[u8; 32]>());
        let mut deed = vec![0u8; rng.gen_range(1..5000)];
        rng.fill_bytes(&mut deed);
        let ct = layered_encrypt::<Ristretto>(&deed, &b.public, &t.public, &mut rng);
        ensure!(
            !ct.outer_body
                .windows(deed.len().min(16))
                .any(|w| w == &deed[..deed.len().min(16)]),
            "trial {trial}: plaintext visible in ciphertext"
        );
        for wrong in [&b, &other] {
            ensure!(
                layered_decrypt_outer(&ct, wrong.secret()).is_err(),
                "trial {trial}: outer layer opened by wrong key"
            );
        }
        let inner =
            layered_decrypt_outer(&ct, t.secret()).map_err(|e| format!("trial {trial}: {e}"))?;
        for wrong in [&t, &other] {
            ensure!(
                layered_decrypt_inner::<Ristretto>(&inner, wrong.secret()).is_err(),
                "trial {trial}: inner layer opened by wrong key"
            );
        }
        let plain = layered_decrypt_inner::<Ristretto>(&inner, b.secret())
            .map_err(|e| format!("trial {trial}: {e}"))?;
        ensure!(plain == deed, "trial {trial}: recovered deed differs");
    }
    Ok("50 deeds".into())
}

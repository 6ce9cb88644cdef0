//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::Check;

fn pedersen() -> Check {
    common::pedersen_homomorphism(1000, 1)
}

fn toy_group() -> Check {
    let a = common::toy_oracle(2)?;
    let b = common::toy_exhaustive()?;
    Ok(format!("{a}; {b}"))
}

fn aggregation() -> Check {
    common::aggregation(16, 200, 3)
}

fn state_machine() -> Check {
    let table = common::transitions::table_check()?;
    common::transitions::window_opening()?;
    common::transitions::cross_chain_evidence()?;
    let s = common::bundled_passes("five-component")?;
    Ok(format!("{table}; five-component: {s}"))
}

fn dead_mans_switch() -> Check {
    common::bundled_passes("dead-mans-switch")
}

fn early_claim() -> Check {
    common::bundled_passes("early-claim")?;
    let stats = common::random_run(4, 1000)?;
    if stats.burned == 0 {
        return Err("randomized run never burned a penalty".into());
    }
    Ok(format!(
        "{} txs ({} rejected) over {} blocks, {} burned, supply conserved throughout",
        stats.txs, stats.rejected, stats.blocks, stats.burned
    ))
}

fn interchain() -> Check {
    common::bundled_passes("interchain")?;
    let mut replays = 0;
    for seed in 0..100 {
        let detail = common::relay_ordering(seed)?;
        replays += detail
            .split(", ")
            .nth(1)
            .and_then(|s| s.split(' ').next())
            .and_then(|n| n.parse::<usize>().ok())
            .unwrap_or(0);
    }
    Ok(format!("100 orderings, {replays} replays rejected"))
}

fn refungible() -> Check {
    common::bundled_passes("shares")?;
    let (p, dust) = common::rft_split(&[60, 40], 1000)?;
    if p != [600, 400] || dust != 0 {
        return Err(format!("{{60,40}}/1000 gave {p:?} dust {dust}"));
    }
    let (p, dust) = common::rft_split(&[1, 1, 1], 100)?;
    if p != [33, 33, 33] || dust != 1 {
        return Err(format!("{{1,1,1}}/100 gave {p:?} dust {dust}"));
    }
    Ok("{600,400}; {33,33,33} + dust 1".into())
}

fn vault() -> Check {
    let files = common::vault_round_trips(100, 1 << 20, 5)?;
    common::deed_layers(6)?;
    common::bundled_passes("deed")?;
    let tamper = common::vault_tamper(7)?;
    Ok(format!("{files}; {tamper}"))
}

fn determinism() -> Check {
    common::bundled_determinism()
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("pedersen homomorphism", pedersen),
        ("toy-group oracle equivalence", toy_group),
        ("signature aggregation", aggregation),
        ("component state machine", state_machine),
        ("dead man's switch", dead_mans_switch),
        ("early-claim economics", early_claim),
        ("interchain atomicity", interchain),
        ("refungible shares", refungible),
        ("file vault", vault),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {name} ({secs:.2}s): {detail}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name} ({secs:.2}s): {e}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

//! The shared checks at sizes small enough for every test run.

mod common;

fn pass(check: common::Check) {
    if let Err(e) = check {
        panic!("{e}");
    }
}

#[test]
fn transition_table() {
    pass(common::transitions::table_check());
}

#[test]
fn claim_opens_window() {
    pass(common::transitions::window_opening());
}

#[test]
fn claim_evidence_is_chain_bound() {
    pass(common::transitions::cross_chain_evidence());
}

#[test]
fn pedersen_matches_dalek() {
    pass(common::pedersen_homomorphism(50, 11));
}

#[test]
fn toy_group_exhaustive() {
    pass(common::toy_exhaustive());
}

#[test]
fn aggregation_rejects_bad_members() {
    pass(common::aggregation(6, 24, 5));
}

#[test]
fn random_activity_burns_and_conserves() {
    let stats = common::random_run(9, 300).unwrap();
    assert_eq!(stats.txs, 300);
    assert!(stats.rejected > 0);
}

#[test]
fn relay_orderings() {
    for seed in 0..5 {
        pass(common::relay_ordering(seed));
    }
}

#[test]
fn share_splits() {
    assert_eq!(
        common::rft_split(&[60, 40], 1000).unwrap(),
        (vec![600, 400], 0)
    );
    assert_eq!(
        common::rft_split(&[1, 1, 1], 100).unwrap(),
        (vec![33, 33, 33], 1)
    );
}

#[test]
fn vault_checks() {
    pass(common::vault_round_trips(8, 20_000, 3));
    pass(common::vault_tamper(4));
    pass(common::deed_layers(5));
}

#[test]
fn bundled_runs_are_deterministic() {
    pass(common::bundled_determinism());
}

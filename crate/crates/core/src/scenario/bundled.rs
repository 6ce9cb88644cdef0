use crate::scenario::Scenario;

/// Scenarios shipped with the crate, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    (
        "five-component",
        include_str!("../../scenarios/five_component.json"),
    ),
    (
        "dead-mans-switch",
        include_str!("../../scenarios/dead_mans_switch.json"),
    ),
    (
        "early-claim",
        include_str!("../../scenarios/early_claim.json"),
    ),
    (
        "interchain",
        include_str!("../../scenarios/interchain.json"),
    ),
    ("deed", include_str!("../../scenarios/deed.json")),
    ("shares", include_str!("../../scenarios/shares.json")),
];

pub fn bundled(name: &str) -> Option<Scenario> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Scenario::parse(text).expect("bundled scenarios parse"))
}

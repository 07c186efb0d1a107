mod common;

use common::conformance::{fixup_cases, rule_cases, Case};

fn run(cases: Vec<Case>) {
    let failed: Vec<String> =
        cases.iter().filter_map(|c| (c.check)().err().map(|e| format!("{}: {e}", c.name))).collect();
    assert!(failed.is_empty(), "{}", failed.join("\n"));
}

#[test]
fn every_rule_fixture_gets_its_label() {
    let cases = rule_cases();
    assert_eq!(cases.len(), 19);
    run(cases);
}

#[test]
fn fixups_apply() {
    run(fixup_cases());
}

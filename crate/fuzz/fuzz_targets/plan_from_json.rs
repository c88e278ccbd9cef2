#![no_main]

use std::sync::OnceLock;

use apmut::rtm::plan_from_json;
use apmut::scenario::{derive_coverage, load_scenario, Scenario};
use libfuzzer_sys::fuzz_target;

static SCENARIO: OnceLock<Scenario> = OnceLock::new();

fn scenario() -> &'static Scenario {
    SCENARIO.get_or_init(|| {
        derive_coverage(
            load_scenario(include_str!("../../scenarios/g1.json")).expect("fixture parses"),
        )
    })
}

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = plan_from_json(scenario(), text);
    }
});

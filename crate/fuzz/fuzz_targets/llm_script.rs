#![no_main]

use dld_core::testkit::ScriptedLlm;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(script) = ScriptedLlm::from_json(text) {
        assert_eq!(ScriptedLlm::from_json(&script.to_json()).expect("round trip"), script);
    }
});

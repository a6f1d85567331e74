#![no_main]

use dld_core::ingest::{emit_dataset_json, parse_dataset_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(dataset) = parse_dataset_json(text) {
        let emitted = emit_dataset_json(&dataset);
        assert_eq!(parse_dataset_json(&emitted).expect("emitted dataset parses"), dataset);
    }
});

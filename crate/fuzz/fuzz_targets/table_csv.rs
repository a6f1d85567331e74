#![no_main]

use dld_core::ingest::parse_table_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(group) = parse_table_csv(data, "fuzz", "label", "description") {
        assert_eq!(group.labels.len(), group.glossary.len());
        assert!(!group.is_empty());
    }
});

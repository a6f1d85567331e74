#![no_main]

use dld_core::lse::wikidata::decode_sparql_response;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(texts) = decode_sparql_response(data) {
        for t in texts {
            assert!(!t.entity_id.is_empty());
        }
    }
});

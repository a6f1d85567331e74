#![no_main]

use dld_core::lse::wikidata::{decode_search_response, is_entity_id, parse_search_html};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = decode_search_response(data);
    if let Ok(html) = std::str::from_utf8(data) {
        for id in parse_search_html(html) {
            assert!(is_entity_id(&id));
        }
    }
});

#![no_main]

use dld_core::sts::embedding::{decode_embedding_request, decode_embedding_response};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = decode_embedding_request(data);
    if let Some((&n, body)) = data.split_first() {
        if let Ok(vectors) = decode_embedding_response(body, n as usize % 8) {
            assert_eq!(vectors.len(), n as usize % 8);
        }
    }
});

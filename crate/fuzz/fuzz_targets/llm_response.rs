#![no_main]

use dld_core::sts::llm::{decode_llm_request, decode_llm_response, score_from_token_distribution, AnswerTokens};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = decode_llm_request(data);
    if let Ok(dist) = decode_llm_response(data) {
        let s = score_from_token_distribution(&dist, &AnswerTokens::default());
        assert!((0.0..=1.0).contains(&s.value));
    }
});

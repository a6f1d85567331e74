#![no_main]

use dld_core::sts::tfidf::tokenize;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let t = tokenize(text);
    for token in t.tokens() {
        assert!(!token.is_empty());
        assert!(!token.chars().any(char::is_whitespace));
    }
});

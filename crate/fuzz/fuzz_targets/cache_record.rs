#![no_main]

use dld_core::lse::CacheRecord;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|line: &str| {
    if let Ok(record) = CacheRecord::parse_line(line) {
        let again = CacheRecord::parse_line(&record.to_line()).expect("serialized record parses");
        assert_eq!(again, record);
    }
});

#![no_main]

use dld_core::ingest::extract_ontology_sources;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let sources = vec![("fuzz.rdf".to_string(), text.to_string())];
    if let Ok(dataset) = extract_ontology_sources(&sources) {
        for group in &dataset.groups {
            for entry in &group.glossary {
                assert!(!entry.text.trim().is_empty());
            }
        }
    }
});

#![no_main]

use dld_core::config::Settings;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(settings) = Settings::from_toml_str(text) {
        let _ = settings.wikidata_config(false);
        let _ = settings.llm_config();
    }
});

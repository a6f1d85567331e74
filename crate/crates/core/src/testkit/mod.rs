//! Offline stand-ins for every external service, plus the bundled fixtures.
//!
//! The mocks implement the same traits (and, through the stub transports,
//! the same wire formats) as the real clients, so switching between them is
//! a matter of configuration.

pub mod embedding;
pub mod knowledge;
pub mod llm;
pub mod server;

use std::path::PathBuf;

use crate::domain::Dataset;
use crate::ingest::parse_dataset_json;

pub use embedding::{EmbeddingStubTransport, HashingEmbedder};
pub use knowledge::{mock_knowledge_lookup, FixtureIndex, MockKnowledge, WikidataStubTransport};
pub use llm::{
    certain, perfect_oracle_script, scripted_llm_respond, yes_no, LlmStubTransport, ScriptRule, ScriptedLlm,
};
pub use server::StubServer;

const SYNTHETIC_JSON: &str = include_str!("../../fixtures/synthetic.json");
const WIKIDATA_CACHE: &str = include_str!("../../fixtures/wikidata_cache.jsonl");

/// Directory holding the bundled fixture files.
pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Six groups of eight entries with unique labels and unique 40-character
/// description prefixes.
pub fn synthetic_dataset() -> Dataset {
    parse_dataset_json(SYNTHETIC_JSON).expect("bundled synthetic dataset is valid")
}

pub fn synthetic_dataset_json() -> &'static str {
    SYNTHETIC_JSON
}

/// Knowledge-cache records covering every label of the synthetic dataset.
pub fn wikidata_fixture() -> &'static str {
    WIKIDATA_CACHE
}

pub fn mock_knowledge() -> MockKnowledge {
    MockKnowledge::parse(WIKIDATA_CACHE).expect("bundled knowledge fixture is valid")
}

/// A matcher with every backend mocked: TFIDF, hashed-token embeddings, the
/// scripted model for both similarity and context questions, and the given
/// knowledge source.
pub fn mock_matcher(
    script: std::sync::Arc<ScriptedLlm>,
    knowledge: std::sync::Arc<dyn crate::lse::KnowledgeSource>,
) -> crate::scoring::Matcher {
    use crate::domain::StsBackendKind;
    use crate::scc::ContextScorer;
    use crate::sts::embedding::EmbeddingSts;
    use crate::sts::llm::LlmSts;
    use std::sync::Arc;

    crate::scoring::Matcher::new()
        .with_sts(
            StsBackendKind::Embedding,
            Arc::new(EmbeddingSts::new(Arc::new(HashingEmbedder::default()))),
        )
        .with_sts(StsBackendKind::Llm, Arc::new(LlmSts::new(script.clone())))
        .with_context(Arc::new(ContextScorer::new(script)))
        .with_knowledge(knowledge)
}

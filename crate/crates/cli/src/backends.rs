use std::sync::Arc;
use std::time::Duration;

use dld_core::config::Settings;
use dld_core::lse::{RecordCache, WikidataClient};
use dld_core::scc::ContextScorer;
use dld_core::scoring::Matcher;
use dld_core::sts::embedding::{EmbeddingSts, HttpEmbedder};
use dld_core::sts::llm::{HttpLanguageModel, LlmSts};
use dld_core::testkit::{mock_matcher, wikidata_fixture, ScriptedLlm};
use dld_core::transport::{FailingTransport, Transport, UreqTransport};
use dld_core::{Result, StsBackendKind};

use crate::BackendArgs;

pub fn settings(args: &BackendArgs) -> Result<Settings> {
    let s = match &args.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    Ok(s.from_process_env())
}

/// Opens the cache and wraps it in a client that only goes to the network
/// with `--live`. Without a cache file, `--mock` runs use the bundled
/// fixture records.
pub fn knowledge(args: &BackendArgs, settings: &Settings) -> Result<Arc<WikidataClient>> {
    let cache = match (&args.cache, args.mock) {
        (Some(path), _) if args.live => RecordCache::open(path)?,
        (Some(path), _) => RecordCache::load(path)?,
        (None, true) => RecordCache::parse_str(wikidata_fixture())?,
        (None, false) => RecordCache::in_memory(),
    };
    let transport: Arc<dyn Transport> = if args.live {
        Arc::new(UreqTransport::new(Duration::from_secs(settings.wikidata.timeout_secs)))
    } else {
        Arc::new(FailingTransport::new())
    };
    Ok(Arc::new(WikidataClient::new(
        transport,
        Arc::new(cache),
        settings.wikidata_config(args.live),
    )))
}

/// A matcher with whichever backends are available. Configurations whose
/// backend is missing fail individually when run.
pub fn matcher(
    args: &BackendArgs,
    settings: &Settings,
    knowledge: Arc<WikidataClient>,
    default_script: impl FnOnce() -> ScriptedLlm,
) -> Result<Matcher> {
    if args.mock {
        let script = match &args.script {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| dld_core::Error::InvalidArgument(format!("{}: {e}", path.display())))?;
                ScriptedLlm::from_json(&text)?
            }
            None => default_script(),
        };
        return Ok(mock_matcher(Arc::new(script), knowledge));
    }

    let mut m = Matcher::new().with_knowledge(knowledge);
    if settings.llm.endpoint.is_some() {
        let cfg = settings.llm_config()?;
        let transport = Arc::new(UreqTransport::new(cfg.request_timeout));
        let model = Arc::new(HttpLanguageModel::new(transport, cfg.clone()));
        m = m
            .with_sts(StsBackendKind::Llm, Arc::new(LlmSts::from_config(model.clone(), &cfg)))
            .with_context(Arc::new(
                ContextScorer::new(model)
                    .with_answer_tokens(cfg.answer_tokens.clone())
                    .with_top_n(cfg.top_n_tokens)
                    .with_limits(cfg.limits),
            ));
    }
    if let Ok(endpoint) = settings.embedding_endpoint() {
        let transport = Arc::new(UreqTransport::new(Duration::from_secs(settings.embedding.timeout_secs)));
        let embedder = Arc::new(HttpEmbedder::new(transport, endpoint));
        m = m.with_sts(StsBackendKind::Embedding, Arc::new(EmbeddingSts::new(embedder)));
    }
    Ok(m)
}

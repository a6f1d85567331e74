use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use dld_core::lse::cache::CacheRecord;
use dld_core::lse::wikidata::{decode_search_response, decode_sparql_response, parse_search_html};
use dld_core::lse::{enrich, EntitySource, KnowledgeSource, RecordCache, WikidataClient, WikidataConfig};
use dld_core::testkit::{wikidata_fixture, FixtureIndex, StubServer, WikidataStubTransport};
use dld_core::transport::{FailingTransport, FnTransport, HttpRequest, HttpResponse, UreqTransport};
use dld_core::{DescriptiveLabel, Error, MatchConfig};

fn fast_live() -> WikidataConfig {
    WikidataConfig {
        live: true,
        min_interval: Duration::ZERO,
        backoff_base: Duration::from_millis(1),
        ..WikidataConfig::default()
    }
}

#[test]
fn fixture_lines_round_trip_bit_exact() {
    for line in wikidata_fixture().lines().filter(|l| !l.trim().is_empty()) {
        let record = CacheRecord::parse_line(line).unwrap();
        assert_eq!(record.to_line(), line);
    }
}

#[test]
fn malformed_cache_lines_report_their_line() {
    let text = format!("{}\n{{\"kind\":\"search\",\"key\":{{\"query\":\"x\",\"limit\":1}},\"payload\":[\"Q1\",\"Q2\"],\"fetched_at\":0}}\n", wikidata_fixture().lines().next().unwrap());
    match RecordCache::parse_str(&text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, Some(2)),
        Err(other) => panic!("{other}"),
        Ok(_) => panic!("over-long payload accepted"),
    }
}

#[test]
fn offline_miss_is_a_retrieval_error() {
    let client = WikidataClient::new(
        Arc::new(FailingTransport::new()),
        Arc::new(RecordCache::in_memory()),
        WikidataConfig::default(),
    );
    let err = client.search_entities("unseen", 10).unwrap_err();
    assert!(err.is_retrieval(), "{err}");
}

#[test]
fn cached_fixture_answers_offline() {
    let failing = Arc::new(FailingTransport::new());
    let client = WikidataClient::new(
        failing.clone(),
        Arc::new(RecordCache::parse_str(wikidata_fixture()).unwrap()),
        WikidataConfig::default(),
    );
    let r = enrich(
        &DescriptiveLabel::new("l", "MVP"),
        &"T-LSE".parse::<MatchConfig>().unwrap(),
        &client,
    )
    .unwrap();
    assert_eq!(r.sentences[0], "MVP");
    assert_eq!(r.provenance[0].source, EntitySource::RawLabel);
    assert!(r.sentences[1].starts_with("most valuable player: "));
    assert!(r.sentences[2].starts_with("minimum viable product: "));
    assert!(r.cache_hit);
    assert_eq!(failing.attempts(), 0);
}

#[test]
fn rate_limited_requests_are_retried() {
    let calls = Arc::new(AtomicUsize::new(0));
    let stub = WikidataStubTransport::new(FixtureIndex::parse(wikidata_fixture()).unwrap());
    let c = calls.clone();
    let transport = FnTransport(move |req: &HttpRequest| {
        if c.fetch_add(1, Ordering::SeqCst) < 2 {
            Ok(HttpResponse {
                status: 429,
                body: Vec::new(),
            })
        } else {
            dld_core::transport::Transport::send(&stub, req)
        }
    });
    let client = WikidataClient::new(Arc::new(transport), Arc::new(RecordCache::in_memory()), fast_live());
    let found = client.search_entities("LVEF", 10).unwrap();
    assert_eq!(found.value.len(), 1);
    assert!(!found.cache_hit);
    assert_eq!(calls.load(Ordering::SeqCst), 3);
    // Now cached.
    assert!(client.search_entities("LVEF", 10).unwrap().cache_hit);
    assert_eq!(calls.load(Ordering::SeqCst), 3);
}

#[test]
fn persistent_rate_limit_gives_up() {
    let transport = FnTransport(|_: &HttpRequest| {
        Ok(HttpResponse {
            status: 503,
            body: Vec::new(),
        })
    });
    let client = WikidataClient::new(Arc::new(transport), Arc::new(RecordCache::in_memory()), fast_live());
    assert!(client.search_entities("LVEF", 10).unwrap_err().is_retrieval());
}

#[test]
fn live_fetch_over_http_appends_to_cache_file() {
    let server = StubServer::start(Arc::new(WikidataStubTransport::new(
        FixtureIndex::parse(wikidata_fixture()).unwrap(),
    )))
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wd.jsonl");
    let config = WikidataConfig {
        search_endpoint: server.url("/w/api.php"),
        sparql_endpoint: server.url("/sparql"),
        ..fast_live()
    };
    let client = WikidataClient::new(
        Arc::new(UreqTransport::new(Duration::from_secs(10))),
        Arc::new(RecordCache::open(&path).unwrap()),
        config,
    );
    let refs = client.search_entities("isbn", 10).unwrap().value;
    let texts = client.fetch_entity_texts(&refs).unwrap().value;
    assert_eq!(texts[0].label, "International Standard Book Number");
    assert_eq!(server.requests(), 2);
    drop(client);

    let reloaded = RecordCache::load(&path).unwrap();
    assert_eq!(reloaded.len(), 2);
    assert!(reloaded.lookup_search("isbn", 10).is_some());
}

#[test]
fn response_decoders() {
    let ids = decode_search_response(br#"{"search":[{"id":"Q5"},{"id":"Q42"}],"success":1}"#).unwrap();
    assert_eq!(ids, ["Q5", "Q42"]);
    assert!(decode_search_response(b"{").is_err());

    let html = r#"<ul><li><a href="/wiki/Q42" title="Q42">Douglas</a></li><li><a href="/wiki/Q5">human</a></li></ul>"#;
    assert_eq!(parse_search_html(html), ["Q42", "Q5"]);

    let sparql = br#"{"head":{"vars":["item","label","description"]},"results":{"bindings":[
        {"item":{"type":"uri","value":"http://www.wikidata.org/entity/Q42"},
         "label":{"type":"literal","xml:lang":"en","value":"Douglas Adams"}}]}}"#;
    let texts = decode_sparql_response(sparql).unwrap();
    assert_eq!(texts[0].entity_id, "Q42");
    assert_eq!(texts[0].description, "");
}

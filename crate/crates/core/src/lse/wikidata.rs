//! Wikidata-backed knowledge source: entity search plus a batched SPARQL
//! query for English labels and descriptions. Everything goes through the
//! record cache; network access happens only in live mode.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::Deserialize;

use super::cache::{entities_key, CacheRecord, RecordCache, SearchKey};
use super::{EntityRef, EntitySource, EntityText, Fetched, KnowledgeSource};
use crate::error::{Error, Result};
use crate::transport::{HttpRequest, HttpResponse, Transport};

pub const SEARCH_ENDPOINT: &str = "https://www.wikidata.org/w/api.php";
pub const SPARQL_ENDPOINT: &str = "https://query.wikidata.org/sparql";

#[derive(Debug, Clone, PartialEq)]
pub struct WikidataConfig {
    pub search_endpoint: String,
    pub sparql_endpoint: String,
    pub language: String,
    /// Minimum spacing between live requests.
    pub min_interval: Duration,
    /// Attempts per request when rate-limited (HTTP 429/503).
    pub max_attempts: u32,
    pub backoff_base: Duration,
    /// Without this, cache misses are errors and no request is sent.
    pub live: bool,
}

impl Default for WikidataConfig {
    fn default() -> Self {
        Self {
            search_endpoint: SEARCH_ENDPOINT.into(),
            sparql_endpoint: SPARQL_ENDPOINT.into(),
            language: "en".into(),
            min_interval: Duration::from_millis(500),
            max_attempts: 3,
            backoff_base: Duration::from_secs(1),
            live: false,
        }
    }
}

pub struct WikidataClient {
    transport: Arc<dyn Transport>,
    cache: Arc<RecordCache>,
    config: WikidataConfig,
    /// Time of the last live request; holding the lock serializes fetches.
    last_request: Mutex<Option<Instant>>,
}

impl WikidataClient {
    pub fn new(transport: Arc<dyn Transport>, cache: Arc<RecordCache>, config: WikidataConfig) -> Self {
        Self {
            transport,
            cache,
            config,
            last_request: Mutex::new(None),
        }
    }

    pub fn cache(&self) -> &Arc<RecordCache> {
        &self.cache
    }

    fn send_rate_limited(&self, request: &HttpRequest) -> Result<HttpResponse> {
        let mut last = self.last_request.lock().unwrap();
        let attempts = self.config.max_attempts.max(1);
        for attempt in 0..attempts {
            if let Some(t) = *last {
                let elapsed = t.elapsed();
                if elapsed < self.config.min_interval {
                    std::thread::sleep(self.config.min_interval - elapsed);
                }
            }
            let response = self.transport.send(request);
            *last = Some(Instant::now());
            let response = response.map_err(|e| Error::Retrieval(e.0))?;
            match response.status {
                429 | 503 if attempt + 1 < attempts => {
                    std::thread::sleep(self.config.backoff_base * 2u32.pow(attempt));
                }
                429 | 503 => {
                    return Err(Error::Retrieval(format!(
                        "{} still rate-limited after {attempts} attempts",
                        request.url
                    )))
                }
                s if (200..300).contains(&s) => return Ok(response),
                s => return Err(Error::Retrieval(format!("{} answered HTTP {s}", request.url))),
            }
        }
        unreachable!("loop returns on its last attempt")
    }

    fn offline_miss(&self, what: String) -> Error {
        Error::Retrieval(format!("{what} not in cache and live fetching is disabled"))
    }
}

fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl KnowledgeSource for WikidataClient {
    fn search_entities(&self, query: &str, max_results: usize) -> Result<Fetched<Vec<EntityRef>>> {
        if query.trim().is_empty() {
            return Err(Error::InvalidArgument("search query is empty".into()));
        }
        let to_refs = |ids: Vec<String>| {
            ids.into_iter()
                .map(|id| EntityRef::new(id, EntitySource::Wikidata))
                .collect::<Vec<_>>()
        };
        if let Some(ids) = self.cache.lookup_search(query, max_results) {
            return Ok(Fetched {
                value: to_refs(ids),
                cache_hit: true,
            });
        }
        if !self.config.live {
            return Err(self.offline_miss(format!("search {query:?} (limit {max_results})")));
        }

        let url = search_url(&self.config.search_endpoint, query, &self.config.language, max_results)?;
        let response = self.send_rate_limited(&HttpRequest::get(url))?;
        let mut ids = match decode_search_response(&response.body) {
            Ok(ids) => ids,
            Err(json_err) => match std::str::from_utf8(&response.body) {
                Ok(html) if looks_like_html(html) => parse_search_html(html),
                _ => return Err(json_err),
            },
        };
        ids.truncate(max_results);
        self.cache.insert(CacheRecord::Search {
            key: SearchKey {
                query: query.to_string(),
                limit: max_results,
            },
            payload: ids.clone(),
            fetched_at: now_secs(),
        })?;
        Ok(Fetched {
            value: to_refs(ids),
            cache_hit: false,
        })
    }

    fn fetch_entity_texts(&self, refs: &[EntityRef]) -> Result<Fetched<Vec<EntityText>>> {
        if refs.is_empty() {
            return Err(Error::InvalidArgument("no entities to fetch".into()));
        }
        let key = entities_key(refs.iter().map(|r| r.entity_id.as_str()));
        let (texts, cache_hit) = match self.cache.lookup_entities(&key) {
            Some(texts) => (texts, true),
            None if !self.config.live => {
                return Err(self.offline_miss(format!("entities {}", key.join(","))));
            }
            None => {
                if let Some(bad) = key.iter().find(|id| !is_entity_id(id)) {
                    return Err(Error::InvalidArgument(format!("not a Wikidata entity id: {bad:?}")));
                }
                let query = sparql_query(&key, &self.config.language);
                let body = form_urlencoded::Serializer::new(String::new())
                    .append_pair("query", &query)
                    .finish()
                    .into_bytes();
                let request =
                    HttpRequest::post(&self.config.sparql_endpoint, "application/x-www-form-urlencoded", body)
                        .header("Accept", "application/sparql-results+json");
                let response = self.send_rate_limited(&request)?;
                let mut texts = decode_sparql_response(&response.body)?;
                texts.retain(|t| key.binary_search(&t.entity_id).is_ok());
                texts.sort();
                self.cache.insert(CacheRecord::Entities {
                    key: key.clone(),
                    payload: texts.clone(),
                    fetched_at: now_secs(),
                })?;
                (texts, false)
            }
        };
        Ok(Fetched {
            value: order_like_refs(texts, refs),
            cache_hit,
        })
    }
}

/// Reorders fetched texts to follow `refs`, dropping duplicates and entities
/// that had no label.
pub(crate) fn order_like_refs(texts: Vec<EntityText>, refs: &[EntityRef]) -> Vec<EntityText> {
    let mut by_id: HashMap<String, EntityText> = HashMap::new();
    for t in texts {
        by_id.entry(t.entity_id.clone()).or_insert(t);
    }
    let mut seen = HashSet::new();
    refs.iter()
        .filter(|r| seen.insert(r.entity_id.as_str()))
        .filter_map(|r| by_id.get(&r.entity_id).cloned())
        .collect()
}

/// `Q123`, `P31`, `L7`.
pub fn is_entity_id(id: &str) -> bool {
    let mut chars = id.chars();
    matches!(chars.next(), Some('Q' | 'P' | 'L')) && id.len() > 1 && chars.all(|c| c.is_ascii_digit())
}

pub fn search_url(endpoint: &str, query: &str, language: &str, limit: usize) -> Result<String> {
    let limit = limit.to_string();
    url::Url::parse_with_params(
        endpoint,
        &[
            ("action", "wbsearchentities"),
            ("search", query),
            ("language", language),
            ("uselang", language),
            ("type", "item"),
            ("limit", limit.as_str()),
            ("format", "json"),
        ],
    )
    .map(String::from)
    .map_err(|e| Error::InvalidArgument(format!("bad search endpoint {endpoint:?}: {e}")))
}

/// One query for all IDs; labels and descriptions restricted to `language`.
pub fn sparql_query(ids: &[String], language: &str) -> String {
    let values = ids.iter().map(|id| format!("wd:{id}")).collect::<Vec<_>>().join(" ");
    let lang: String = language
        .chars()
        .filter(|c| c.is_ascii_alphanumeric() || *c == '-')
        .collect();
    format!(
        "PREFIX wd: <http://www.wikidata.org/entity/>\n\
         PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n\
         PREFIX schema: <http://schema.org/>\n\
         SELECT ?item ?label ?description WHERE {{\n  \
         VALUES ?item {{ {values} }}\n  \
         OPTIONAL {{ ?item rdfs:label ?label . FILTER(LANG(?label) = \"{lang}\") }}\n  \
         OPTIONAL {{ ?item schema:description ?description . FILTER(LANG(?description) = \"{lang}\") }}\n\
         }}"
    )
}

#[derive(Deserialize)]
struct SearchResponse {
    search: Vec<SearchHit>,
}

#[derive(Deserialize)]
struct SearchHit {
    id: String,
}

/// Entity IDs from a `wbsearchentities` JSON response.
pub fn decode_search_response(body: &[u8]) -> Result<Vec<String>> {
    let resp: SearchResponse =
        serde_json::from_slice(body).map_err(|e| Error::Protocol(format!("malformed search response: {e}")))?;
    let mut seen = HashSet::new();
    Ok(resp
        .search
        .into_iter()
        .map(|h| h.id)
        .filter(|id| !id.is_empty() && seen.insert(id.clone()))
        .collect())
}

fn looks_like_html(text: &str) -> bool {
    let head = text.trim_start().get(..text.trim_start().len().min(256)).unwrap_or("");
    head.to_ascii_lowercase().contains("<html") || head.to_ascii_lowercase().starts_with("<!doctype")
}

/// Entity IDs linked from a search results web page (`href="/wiki/Q42"`),
/// in page order, without duplicates.
pub fn parse_search_html(html: &str) -> Vec<String> {
    const NEEDLE: &str = "/wiki/";
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut rest = html;
    while let Some(pos) = rest.find(NEEDLE) {
        let after = &rest[pos + NEEDLE.len()..];
        let candidate: String = after.chars().take_while(|c| c.is_ascii_alphanumeric()).collect();
        let terminated = after[candidate.len()..]
            .chars()
            .next()
            .is_none_or(|c| c == '"' || c == '\'' || c == '#' || c == '?');
        if candidate.starts_with('Q') && is_entity_id(&candidate) && terminated && seen.insert(candidate.clone()) {
            out.push(candidate);
        }
        rest = after;
    }
    out
}

#[derive(Deserialize)]
struct SparqlResponse {
    results: SparqlResults,
}

#[derive(Deserialize)]
struct SparqlResults {
    bindings: Vec<HashMap<String, SparqlValue>>,
}

#[derive(Deserialize)]
struct SparqlValue {
    value: String,
}

/// Label/description rows from SPARQL JSON results. Rows without a label
/// are dropped; a missing description becomes `""`.
pub fn decode_sparql_response(body: &[u8]) -> Result<Vec<EntityText>> {
    let resp: SparqlResponse =
        serde_json::from_slice(body).map_err(|e| Error::Protocol(format!("malformed SPARQL response: {e}")))?;
    let mut out: Vec<EntityText> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for row in resp.results.bindings {
        let Some(item) = row.get("item") else {
            return Err(Error::Protocol("SPARQL row without ?item".into()));
        };
        let id = item.value.rsplit('/').next().unwrap_or_default().to_string();
        if id.is_empty() {
            return Err(Error::Protocol(format!("bad entity IRI {:?}", item.value)));
        }
        let label = row.get("label").map(|v| v.value.clone()).unwrap_or_default();
        let description = row.get("description").map(|v| v.value.clone()).unwrap_or_default();
        match index.get(&id) {
            Some(&i) => {
                let existing = &mut out[i];
                if existing.label.is_empty() {
                    existing.label = label;
                }
                if existing.description.is_empty() {
                    existing.description = description;
                }
            }
            None => {
                index.insert(id.clone(), out.len());
                out.push(EntityText::new(id, label, description));
            }
        }
    }
    out.retain(|t| !t.label.is_empty());
    Ok(out)
}

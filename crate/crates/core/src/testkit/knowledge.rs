//! Offline knowledge: a mock source and a Wikidata-protocol stub, both fed
//! from files in the record-cache format.

use std::collections::HashMap;
use std::path::Path;

use serde_json::json;

use crate::error::{Error, Result};
use crate::lse::cache::CacheRecord;
use crate::lse::{EntityRef, EntitySource, EntityText, Fetched, KnowledgeSource};
use crate::transport::{HttpRequest, HttpResponse, Method, Transport, TransportError};

use super::llm::json_response;

/// Search results and entity texts indexed from cache records.
#[derive(Debug, Clone, Default)]
pub struct FixtureIndex {
    searches: HashMap<String, Vec<(usize, Vec<String>)>>,
    entities: HashMap<String, EntityText>,
}

impl FixtureIndex {
    pub fn parse(text: &str) -> Result<Self> {
        let mut index = Self::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record = CacheRecord::parse_line(line).map_err(|e| match e {
                Error::Parse { message, column, .. } => Error::Parse {
                    message,
                    line: Some(i + 1),
                    column,
                },
                other => other,
            })?;
            index.add(record);
        }
        Ok(index)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    fn add(&mut self, record: CacheRecord) {
        match record {
            CacheRecord::Search { key, payload, .. } => {
                let list = self.searches.entry(key.query).or_default();
                list.retain(|(limit, _)| *limit != key.limit);
                list.push((key.limit, payload));
            }
            CacheRecord::Entities { payload, .. } => {
                for text in payload {
                    self.entities.insert(text.entity_id.clone(), text);
                }
            }
        }
    }

    /// IDs for `query` at `limit`. A recorded search with a larger limit
    /// answers smaller ones by truncation; one that came back short of its
    /// limit was exhaustive and answers any limit.
    pub fn search(&self, query: &str, limit: usize) -> Option<Vec<String>> {
        let recorded = self.searches.get(query)?;
        if let Some((_, ids)) = recorded.iter().find(|(l, _)| *l == limit) {
            return Some(ids.clone());
        }
        recorded
            .iter()
            .filter(|(l, ids)| *l > limit || ids.len() < *l)
            .min_by_key(|(l, _)| *l)
            .map(|(_, ids)| ids.iter().take(limit).cloned().collect())
    }

    pub fn entity(&self, id: &str) -> Option<&EntityText> {
        self.entities.get(id)
    }

    pub fn query_count(&self) -> usize {
        self.searches.len()
    }
}

/// Knowledge source answering only from fixtures. Unknown queries yield no
/// entities; nothing ever touches the network.
#[derive(Debug, Clone, Default)]
pub struct MockKnowledge {
    index: FixtureIndex,
}

impl MockKnowledge {
    pub fn new(index: FixtureIndex) -> Self {
        Self { index }
    }

    pub fn parse(text: &str) -> Result<Self> {
        FixtureIndex::parse(text).map(Self::new)
    }

    pub fn load(path: &Path) -> Result<Self> {
        FixtureIndex::load(path).map(Self::new)
    }
}

/// Free-function form of [`MockKnowledge`] lookup: entity texts for a query.
pub fn mock_knowledge_lookup(query: &str, fixtures: &MockKnowledge, max_results: usize) -> Result<Vec<EntityText>> {
    let refs = fixtures.search_entities(query, max_results)?.value;
    if refs.is_empty() {
        return Ok(Vec::new());
    }
    Ok(fixtures.fetch_entity_texts(&refs)?.value)
}

impl KnowledgeSource for MockKnowledge {
    fn search_entities(&self, query: &str, max_results: usize) -> Result<Fetched<Vec<EntityRef>>> {
        if query.trim().is_empty() {
            return Err(Error::InvalidArgument("search query is empty".into()));
        }
        let ids = self.index.search(query, max_results).unwrap_or_default();
        Ok(Fetched {
            value: ids
                .into_iter()
                .map(|id| EntityRef::new(id, EntitySource::Mock))
                .collect(),
            cache_hit: true,
        })
    }

    fn fetch_entity_texts(&self, refs: &[EntityRef]) -> Result<Fetched<Vec<EntityText>>> {
        if refs.is_empty() {
            return Err(Error::InvalidArgument("no entities to fetch".into()));
        }
        let mut seen = std::collections::HashSet::new();
        let value = refs
            .iter()
            .filter(|r| seen.insert(r.entity_id.as_str()))
            .filter_map(|r| self.index.entity(&r.entity_id).cloned())
            .collect();
        Ok(Fetched { value, cache_hit: true })
    }
}

/// Answers `wbsearchentities` GETs and SPARQL POSTs from fixtures, in the
/// real services' response shapes.
pub struct WikidataStubTransport {
    index: FixtureIndex,
}

impl WikidataStubTransport {
    pub fn new(index: FixtureIndex) -> Self {
        Self { index }
    }

    fn search(&self, url: &url::Url) -> HttpResponse {
        let params: HashMap<String, String> = url.query_pairs().into_owned().collect();
        let query = params.get("search").cloned().unwrap_or_default();
        let limit = params.get("limit").and_then(|l| l.parse().ok()).unwrap_or(7);
        let ids = self.index.search(&query, limit).unwrap_or_default();
        let hits: Vec<_> = ids.iter().map(|id| json!({ "id": id, "title": id })).collect();
        json_response(
            200,
            &json!({ "searchinfo": { "search": query }, "search": hits, "success": 1 }),
        )
    }

    fn sparql(&self, body: &[u8]) -> HttpResponse {
        let query = form_urlencoded::parse(body)
            .find(|(k, _)| k == "query")
            .map(|(_, v)| v.into_owned())
            .unwrap_or_default();
        let Some(values) = query
            .split("VALUES ?item {")
            .nth(1)
            .and_then(|rest| rest.split('}').next())
        else {
            return json_response(400, &json!({ "error": "no VALUES clause" }));
        };
        let mut bindings = Vec::new();
        for id in values.split_whitespace().filter_map(|t| t.strip_prefix("wd:")) {
            let Some(text) = self.index.entity(id) else { continue };
            let mut row = json!({
                "item": { "type": "uri", "value": format!("http://www.wikidata.org/entity/{id}") },
                "label": { "type": "literal", "xml:lang": "en", "value": text.label },
            });
            if !text.description.is_empty() {
                row["description"] = json!({ "type": "literal", "xml:lang": "en", "value": text.description });
            }
            bindings.push(row);
        }
        json_response(
            200,
            &json!({ "head": { "vars": ["item", "label", "description"] }, "results": { "bindings": bindings } }),
        )
    }
}

impl Transport for WikidataStubTransport {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let url = url::Url::parse(&request.url).map_err(|e| TransportError(format!("bad url: {e}")))?;
        let is_search = url.query_pairs().any(|(k, v)| k == "action" && v == "wbsearchentities");
        Ok(match request.method {
            Method::Get if is_search => self.search(&url),
            Method::Post => self.sparql(&request.body),
            _ => HttpResponse {
                status: 404,
                body: b"not found".to_vec(),
            },
        })
    }
}

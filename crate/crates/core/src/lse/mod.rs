//! Label enrichment from external knowledge.
//!
//! A label is sent to an entity search service; the labels and descriptions
//! of the matching entities become extra sentences that stand in for the
//! label when scoring text similarity.

pub mod cache;
pub mod wikidata;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::domain::{DescriptiveLabel, MatchConfig};
use crate::error::{Error, Result};

pub use cache::{CacheRecord, RecordCache};
pub use wikidata::{WikidataClient, WikidataConfig};

pub const DEFAULT_MAX_RESULTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntitySource {
    Wikidata,
    Mock,
    /// Synthetic provenance for the raw label kept among the sentences.
    RawLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EntityRef {
    pub entity_id: String,
    pub source: EntitySource,
}

impl EntityRef {
    pub fn new(entity_id: impl Into<String>, source: EntitySource) -> Self {
        Self {
            entity_id: entity_id.into(),
            source,
        }
    }
}

/// Label and description of one entity. `description` is empty when the
/// entity has none.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntityText {
    #[serde(rename = "id")]
    pub entity_id: String,
    pub label: String,
    pub description: String,
}

impl EntityText {
    pub fn new(entity_id: impl Into<String>, label: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            entity_id: entity_id.into(),
            label: label.into(),
            description: description.into(),
        }
    }
}

/// A lookup result and whether it was served without a network call.
#[derive(Debug, Clone, PartialEq)]
pub struct Fetched<T> {
    pub value: T,
    pub cache_hit: bool,
}

pub trait KnowledgeSource: Send + Sync {
    /// Entity IDs for `query`, in the search engine's rank order.
    fn search_entities(&self, query: &str, max_results: usize) -> Result<Fetched<Vec<EntityRef>>>;

    /// Label/description for each entity, in `refs` order.
    fn fetch_entity_texts(&self, refs: &[EntityRef]) -> Result<Fetched<Vec<EntityText>>>;
}

impl<T: KnowledgeSource + ?Sized> KnowledgeSource for std::sync::Arc<T> {
    fn search_entities(&self, query: &str, max_results: usize) -> Result<Fetched<Vec<EntityRef>>> {
        (**self).search_entities(query, max_results)
    }

    fn fetch_entity_texts(&self, refs: &[EntityRef]) -> Result<Fetched<Vec<EntityText>>> {
        (**self).fetch_entity_texts(refs)
    }
}

/// Sentences enriching one label, each with the entity it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnrichmentResult {
    pub label_text: String,
    pub sentences: Vec<String>,
    pub provenance: Vec<EntityRef>,
    pub cache_hit: bool,
}

/// `"{label}: {description}"`, or just the label when there is no description.
pub fn sentence_for(text: &EntityText) -> String {
    if text.description.is_empty() {
        text.label.clone()
    } else {
        format!("{}: {}", text.label, text.description)
    }
}

pub fn generate_sentences(texts: &[EntityText]) -> Vec<String> {
    let mut seen = HashSet::new();
    texts
        .iter()
        .map(sentence_for)
        .filter(|s| seen.insert(s.clone()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnrichOptions {
    pub lse_enabled: bool,
    pub include_raw_label: bool,
    pub max_results: usize,
}

impl EnrichOptions {
    pub fn from_config(config: &MatchConfig) -> Self {
        Self {
            lse_enabled: config.lse_enabled,
            include_raw_label: config.include_raw_label,
            max_results: DEFAULT_MAX_RESULTS,
        }
    }
}

pub fn enrich(
    label: &DescriptiveLabel,
    config: &MatchConfig,
    source: &dyn KnowledgeSource,
) -> Result<EnrichmentResult> {
    enrich_with(label, &EnrichOptions::from_config(config), source)
}

pub fn enrich_with(
    label: &DescriptiveLabel,
    options: &EnrichOptions,
    source: &dyn KnowledgeSource,
) -> Result<EnrichmentResult> {
    let raw_ref = || EntityRef::new(label.label_id.clone(), EntitySource::RawLabel);
    if !options.lse_enabled {
        return Ok(EnrichmentResult {
            label_text: label.text.clone(),
            sentences: vec![label.text.clone()],
            provenance: vec![raw_ref()],
            cache_hit: true,
        });
    }

    let attach = |e: Error| Error::Enrichment {
        label: label.text.clone(),
        source: Box::new(e),
    };

    let mut sentences = Vec::new();
    let mut provenance = Vec::new();
    let mut seen = HashSet::new();
    if options.include_raw_label {
        seen.insert(label.text.clone());
        sentences.push(label.text.clone());
        provenance.push(raw_ref());
    }

    let query = label.text.trim();
    let found = source.search_entities(query, options.max_results).map_err(attach)?;
    let mut cache_hit = found.cache_hit;
    if !found.value.is_empty() {
        let texts = source.fetch_entity_texts(&found.value).map_err(attach)?;
        cache_hit &= texts.cache_hit;
        let source_of: std::collections::HashMap<&str, EntitySource> =
            found.value.iter().map(|r| (r.entity_id.as_str(), r.source)).collect();
        for text in &texts.value {
            let sentence = sentence_for(text);
            if seen.insert(sentence.clone()) {
                let src = source_of
                    .get(text.entity_id.as_str())
                    .copied()
                    .unwrap_or(EntitySource::Wikidata);
                sentences.push(sentence);
                provenance.push(EntityRef::new(text.entity_id.clone(), src));
            }
        }
    }

    Ok(EnrichmentResult {
        label_text: label.text.clone(),
        sentences,
        provenance,
        cache_hit,
    })
}

/// Knowledge source with no entities at all.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoKnowledge;

impl KnowledgeSource for NoKnowledge {
    fn search_entities(&self, query: &str, _max_results: usize) -> Result<Fetched<Vec<EntityRef>>> {
        if query.trim().is_empty() {
            return Err(Error::InvalidArgument("search query is empty".into()));
        }
        Ok(Fetched {
            value: Vec::new(),
            cache_hit: true,
        })
    }

    fn fetch_entity_texts(&self, refs: &[EntityRef]) -> Result<Fetched<Vec<EntityText>>> {
        if refs.is_empty() {
            return Err(Error::InvalidArgument("no entities to fetch".into()));
        }
        Ok(Fetched {
            value: Vec::new(),
            cache_hit: true,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentence_templates() {
        assert_eq!(
            generate_sentences(&[EntityText::new("Q1", "amount", "quantity of money")]),
            ["amount: quantity of money"]
        );
        assert_eq!(generate_sentences(&[EntityText::new("Q2", "AADT", "")]), ["AADT"]);
        let dup = EntityText::new("Q3", "x", "y");
        let dup2 = EntityText::new("Q4", "x", "y");
        assert_eq!(generate_sentences(&[dup, dup2]), ["x: y"]);
    }

    #[test]
    fn lse_off_returns_label_only() {
        let label = DescriptiveLabel::new("g:0", "ALL");
        let config = MatchConfig::new(crate::domain::StsBackendKind::Tfidf, false, false);
        let r = enrich(&label, &config, &NoKnowledge).unwrap();
        assert_eq!(r.sentences, ["ALL"]);
        assert_eq!(r.provenance.len(), 1);
    }

    #[test]
    fn no_hits_falls_back_to_label() {
        let label = DescriptiveLabel::new("g:0", "zzz");
        let mut config = MatchConfig::new(crate::domain::StsBackendKind::Tfidf, true, false);
        assert_eq!(enrich(&label, &config, &NoKnowledge).unwrap().sentences, ["zzz"]);
        config.include_raw_label = false;
        assert!(enrich(&label, &config, &NoKnowledge).unwrap().sentences.is_empty());
    }
}

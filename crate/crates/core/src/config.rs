//! Backend settings from a TOML file, with environment overrides.
//!
//! ```toml
//! [llm]
//! endpoint = "http://localhost:8000/first-token"
//! top_n_tokens = 20
//! timeout_secs = 120
//! max_in_flight = 4
//!
//! [embedding]
//! endpoint = "http://localhost:8001/embed"
//!
//! [wikidata]
//! language = "en"
//! min_interval_ms = 500
//!
//! [prompt]
//! max_context_items = 30
//! max_desc_chars = 1000
//! ```
//!
//! `DLD_LLM_ENDPOINT`, `DLD_LLM_API_KEY` and `DLD_EMBED_ENDPOINT` override the
//! corresponding file values.

use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lse::wikidata::{WikidataConfig, SEARCH_ENDPOINT, SPARQL_ENDPOINT};
use crate::prompt::PromptLimits;
use crate::sts::llm::{AnswerTokens, LlmBackendConfig, DEFAULT_TOP_N_TOKENS};

pub const ENV_LLM_ENDPOINT: &str = "DLD_LLM_ENDPOINT";
pub const ENV_LLM_API_KEY: &str = "DLD_LLM_API_KEY";
pub const ENV_EMBED_ENDPOINT: &str = "DLD_EMBED_ENDPOINT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmSettings {
    pub endpoint: Option<String>,
    pub api_key: Option<String>,
    pub top_n_tokens: usize,
    pub timeout_secs: u64,
    pub max_in_flight: usize,
    pub yes_tokens: Option<Vec<String>>,
    pub no_tokens: Option<Vec<String>>,
}

impl Default for LlmSettings {
    fn default() -> Self {
        Self {
            endpoint: None,
            api_key: None,
            top_n_tokens: DEFAULT_TOP_N_TOKENS,
            timeout_secs: 120,
            max_in_flight: 4,
            yes_tokens: None,
            no_tokens: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingSettings {
    pub endpoint: Option<String>,
    pub timeout_secs: u64,
}

impl Default for EmbeddingSettings {
    fn default() -> Self {
        Self {
            endpoint: None,
            timeout_secs: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WikidataSettings {
    pub search_endpoint: String,
    pub sparql_endpoint: String,
    pub language: String,
    pub min_interval_ms: u64,
    pub max_attempts: u32,
    pub timeout_secs: u64,
}

impl Default for WikidataSettings {
    fn default() -> Self {
        Self {
            search_endpoint: SEARCH_ENDPOINT.into(),
            sparql_endpoint: SPARQL_ENDPOINT.into(),
            language: "en".into(),
            min_interval_ms: 500,
            max_attempts: 3,
            timeout_secs: 60,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub llm: LlmSettings,
    pub embedding: EmbeddingSettings,
    pub wikidata: WikidataSettings,
    pub prompt: PromptLimits,
}

impl Settings {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_col(text, s.start))
                .map_or((None, None), |(l, c)| (Some(l), Some(c)));
            Error::Parse {
                message: e.message().to_string(),
                line,
                column,
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// Applies overrides from `lookup` (normally the process environment).
    pub fn apply_env(mut self, lookup: impl Fn(&str) -> Option<String>) -> Self {
        if let Some(v) = lookup(ENV_LLM_ENDPOINT).filter(|v| !v.is_empty()) {
            self.llm.endpoint = Some(v);
        }
        if let Some(v) = lookup(ENV_LLM_API_KEY).filter(|v| !v.is_empty()) {
            self.llm.api_key = Some(v);
        }
        if let Some(v) = lookup(ENV_EMBED_ENDPOINT).filter(|v| !v.is_empty()) {
            self.embedding.endpoint = Some(v);
        }
        self
    }

    pub fn from_process_env(self) -> Self {
        self.apply_env(|k| std::env::var(k).ok())
    }

    pub fn llm_config(&self) -> Result<LlmBackendConfig> {
        let endpoint = self.llm.endpoint.clone().ok_or_else(|| {
            Error::InvalidArgument(format!(
                "no language model endpoint configured (set {ENV_LLM_ENDPOINT})"
            ))
        })?;
        let mut cfg = LlmBackendConfig::new(endpoint);
        cfg.api_key = self.llm.api_key.clone();
        cfg.top_n_tokens = self.llm.top_n_tokens.max(1);
        cfg.request_timeout = Duration::from_secs(self.llm.timeout_secs);
        cfg.max_in_flight = self.llm.max_in_flight.max(1);
        cfg.limits = self.prompt;
        if self.llm.yes_tokens.is_some() || self.llm.no_tokens.is_some() {
            let d = AnswerTokens::default();
            let yes = self
                .llm
                .yes_tokens
                .clone()
                .unwrap_or_else(|| d.yes().iter().cloned().collect());
            let no = self
                .llm
                .no_tokens
                .clone()
                .unwrap_or_else(|| d.no().iter().cloned().collect());
            cfg.answer_tokens = AnswerTokens::new(yes, no)?;
        }
        Ok(cfg)
    }

    pub fn embedding_endpoint(&self) -> Result<&str> {
        self.embedding.endpoint.as_deref().ok_or_else(|| {
            Error::InvalidArgument(format!("no embedding endpoint configured (set {ENV_EMBED_ENDPOINT})"))
        })
    }

    pub fn wikidata_config(&self, live: bool) -> WikidataConfig {
        WikidataConfig {
            search_endpoint: self.wikidata.search_endpoint.clone(),
            sparql_endpoint: self.wikidata.sparql_endpoint.clone(),
            language: self.wikidata.language.clone(),
            min_interval: Duration::from_millis(self.wikidata.min_interval_ms),
            max_attempts: self.wikidata.max_attempts.max(1),
            live,
            ..WikidataConfig::default()
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map(|s| s.chars().count()).unwrap_or(0) + 1;
    (line, col)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_file_values() {
        let s = Settings::from_toml_str("[llm]\nendpoint = \"http://a\"\ntop_n_tokens = 5\n").unwrap();
        assert_eq!(s.llm.endpoint.as_deref(), Some("http://a"));
        assert_eq!(s.llm.top_n_tokens, 5);
        assert_eq!(s.prompt, PromptLimits::default());
        assert_eq!(s.wikidata.language, "en");
    }

    #[test]
    fn env_overrides_file() {
        let s = Settings::from_toml_str("[llm]\nendpoint = \"http://file\"\n")
            .unwrap()
            .apply_env(|k| match k {
                ENV_LLM_ENDPOINT => Some("http://env".into()),
                ENV_EMBED_ENDPOINT => Some("http://embed".into()),
                _ => None,
            });
        assert_eq!(s.llm_config().unwrap().endpoint, "http://env");
        assert_eq!(s.embedding_endpoint().unwrap(), "http://embed");
        assert!(s.llm.api_key.is_none());
    }

    #[test]
    fn unknown_keys_rejected_with_location() {
        match Settings::from_toml_str("[llm]\n\nendpont = 1\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, Some(3)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn missing_endpoints_are_argument_errors() {
        let s = Settings::default();
        assert!(s.llm_config().is_err());
        assert!(s.embedding_endpoint().is_err());
    }
}

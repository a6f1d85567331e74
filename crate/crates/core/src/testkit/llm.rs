//! Scripted language model and wire-protocol stubs.
//!
//! Script files are JSON:
//!
//! ```json
//! {
//!   "rules": [
//!     {"pattern": "School District Code", "tokens": [{"token": "Yes", "probability": 0.9}]}
//!   ],
//!   "default": [{"token": "No", "probability": 1.0}]
//! }
//! ```
//!
//! The first rule whose pattern occurs in the prompt answers; otherwise the
//! default does.

use serde::{Deserialize, Serialize};

use crate::domain::Dataset;
use crate::error::{Error, Result};
use crate::prompt::{truncate_chars, PromptLimits};
use crate::sts::llm::{decode_llm_request, LanguageModel, LlmResponse, TokenDistribution, WireToken};
use crate::transport::{HttpRequest, HttpResponse, Transport, TransportError};

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptRule {
    pub pattern: String,
    pub distribution: TokenDistribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedLlm {
    pub rules: Vec<ScriptRule>,
    pub default: TokenDistribution,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleFile {
    pattern: String,
    tokens: Vec<WireToken>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptFile {
    #[serde(default)]
    rules: Vec<RuleFile>,
    default: Vec<WireToken>,
}

fn to_dist(tokens: Vec<WireToken>) -> Result<TokenDistribution> {
    TokenDistribution::new(tokens.into_iter().map(|t| (t.token, t.probability)).collect())
}

fn to_wire(dist: &TokenDistribution) -> Vec<WireToken> {
    LlmResponse::from(dist).tokens
}

/// All mass on one token.
pub fn certain(token: &str) -> TokenDistribution {
    TokenDistribution::from_pairs([(token, 1.0)]).expect("valid distribution")
}

/// `p` on "Yes", `1 - p` on "No".
pub fn yes_no(p_yes: f64) -> TokenDistribution {
    TokenDistribution::from_pairs([("Yes", p_yes), ("No", 1.0 - p_yes)]).expect("valid distribution")
}

impl ScriptedLlm {
    pub fn new(default: TokenDistribution) -> Self {
        Self {
            rules: Vec::new(),
            default,
        }
    }

    pub fn rule(mut self, pattern: impl Into<String>, distribution: TokenDistribution) -> Self {
        self.rules.push(ScriptRule {
            pattern: pattern.into(),
            distribution,
        });
        self
    }

    /// First matching rule, else the default.
    pub fn respond(&self, prompt: &str) -> &TokenDistribution {
        self.rules
            .iter()
            .find(|r| prompt.contains(&r.pattern))
            .map(|r| &r.distribution)
            .unwrap_or(&self.default)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScriptFile = serde_json::from_str(text).map_err(|e| Error::from_json(&e))?;
        let rules = file
            .rules
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                if r.pattern.is_empty() {
                    return Err(Error::parse(format!("script rule {i}: empty pattern")));
                }
                let distribution = to_dist(r.tokens).map_err(|e| Error::parse(format!("script rule {i}: {e}")))?;
                Ok(ScriptRule {
                    pattern: r.pattern,
                    distribution,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let default = to_dist(file.default).map_err(|e| Error::parse(format!("script default: {e}")))?;
        Ok(Self { rules, default })
    }

    pub fn to_json(&self) -> String {
        let file = ScriptFile {
            rules: self
                .rules
                .iter()
                .map(|r| RuleFile {
                    pattern: r.pattern.clone(),
                    tokens: to_wire(&r.distribution),
                })
                .collect(),
            default: to_wire(&self.default),
        };
        serde_json::to_string_pretty(&file).expect("script serializes")
    }
}

/// Free-function form of [`ScriptedLlm::respond`].
pub fn scripted_llm_respond<'a>(prompt: &str, script: &'a ScriptedLlm) -> &'a TokenDistribution {
    script.respond(prompt)
}

impl LanguageModel for ScriptedLlm {
    fn first_token_distribution(&self, prompt: &str, top_n: usize) -> Result<TokenDistribution> {
        Ok(self.respond(prompt).clone().truncated(top_n))
    }
}

/// Number of description characters the oracle keys on.
pub const ORACLE_PREFIX_CHARS: usize = 40;

/// A script that answers "Yes" exactly for true pairs of `dataset`: the
/// similarity question for a group's own label and the start of its true
/// description, and the context question for a group's own label set and
/// glossary. Everything else gets "No".
///
/// Needs unique label texts and unique 40-character description prefixes.
pub fn perfect_oracle_script(dataset: &Dataset, limits: &PromptLimits) -> ScriptedLlm {
    let mut script = ScriptedLlm::new(certain("No"));
    for group in &dataset.groups {
        for (label, entry) in group.labels.iter().zip(&group.glossary) {
            let desc = truncate_chars(&entry.text, limits.max_desc_chars);
            let prefix = truncate_chars(desc, ORACLE_PREFIX_CHARS);
            script = script.rule(
                format!(
                    "Is \"{}\" same to the following concept in glossary?\nglossary description: \"{prefix}",
                    label.text
                ),
                certain("Yes"),
            );
        }
        let shown = group.labels.len().min(limits.max_context_items);
        if let (Some(last), Some(first)) = (shown.checked_sub(1).map(|i| &group.labels[i]), group.glossary.first()) {
            script = script.rule(
                format!(
                    "\n  - {}\nThe given glossary has these glossary terms.\n[Glossary terms]\n  - {}\n",
                    last.text,
                    truncate_chars(&first.text, limits.max_desc_chars)
                ),
                certain("Yes"),
            );
        }
    }
    script
}

/// Serves the model wire protocol from any [`LanguageModel`] without a
/// network.
pub struct LlmStubTransport<M> {
    model: M,
}

impl<M: LanguageModel> LlmStubTransport<M> {
    pub fn new(model: M) -> Self {
        Self { model }
    }
}

pub(crate) fn json_response(status: u16, body: &impl Serialize) -> HttpResponse {
    HttpResponse {
        status,
        body: serde_json::to_vec(body).expect("response serializes"),
    }
}

impl<M: LanguageModel> Transport for LlmStubTransport<M> {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let req = match decode_llm_request(&request.body) {
            Ok(r) => r,
            Err(e) => return Ok(json_response(400, &serde_json::json!({ "error": e.to_string() }))),
        };
        match self.model.first_token_distribution(&req.prompt, req.top_n_tokens) {
            Ok(dist) => Ok(json_response(
                200,
                &LlmResponse::from(&dist.truncated(req.top_n_tokens)),
            )),
            Err(e) => Ok(json_response(500, &serde_json::json!({ "error": e.to_string() }))),
        }
    }
}

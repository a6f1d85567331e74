//! LLM-backed similarity: ask a yes/no question and turn the distribution of
//! the first answer token into `p_yes / (p_yes + p_no)`.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{SentenceScorer, StsContext, StsScore};
use crate::domain::{DescriptiveLabel, GlossaryEntry};
use crate::error::{Error, Result};
use crate::prompt::{bullet_block, render, sts_template, truncate_chars, PromptLimits};
use crate::sync::Semaphore;
use crate::transport::{HttpRequest, Transport};

/// Below this combined yes/no mass the answer is treated as undetermined.
pub const MIN_DECISIVE_MASS: f64 = 1e-12;
/// Score reported for undetermined answers.
pub const UNDETERMINED_SCORE: f64 = 0.5;

/// Top-N candidate tokens for one answer position, most probable first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TokenDistribution {
    entries: Vec<(String, f64)>,
}

impl TokenDistribution {
    /// Validates and sorts descending by probability (stable for ties).
    pub fn new(entries: Vec<(String, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("token distribution is empty".into()));
        }
        let mut seen = HashSet::new();
        let mut total = 0.0;
        for (token, p) in &entries {
            if !p.is_finite() || !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidArgument(format!(
                    "probability of token {token:?} is {p}, outside [0, 1]"
                )));
            }
            if !seen.insert(token.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate token {token:?}")));
            }
            total += p;
        }
        if total > 1.0 + 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "token probabilities sum to {total}, more than 1"
            )));
        }
        let mut entries = entries;
        entries.sort_by(|a, b| b.1.total_cmp(&a.1));
        Ok(Self { entries })
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(t, p)| (t.into(), p)).collect())
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    /// Keeps the `n` most probable tokens.
    pub fn truncated(mut self, n: usize) -> Self {
        self.entries.truncate(n.max(1));
        self
    }
}

/// Token surface forms counted as "yes" and as "no".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerTokens {
    yes: BTreeSet<String>,
    no: BTreeSet<String>,
}

impl AnswerTokens {
    /// Forms are normalized the same way tokens are classified: trimmed and
    /// lowercased. The two sets must be non-empty and disjoint.
    pub fn new<I, J, S, T>(yes: I, no: J) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let norm = |s: &str| s.trim().to_lowercase();
        let yes: BTreeSet<String> = yes.into_iter().map(|s| norm(s.as_ref())).collect();
        let no: BTreeSet<String> = no.into_iter().map(|s| norm(s.as_ref())).collect();
        if yes.is_empty() || no.is_empty() {
            return Err(Error::InvalidArgument("yes and no token sets must be non-empty".into()));
        }
        if let Some(both) = yes.intersection(&no).next() {
            return Err(Error::InvalidArgument(format!(
                "token {both:?} is in both the yes and the no set"
            )));
        }
        Ok(Self { yes, no })
    }

    pub fn swapped(&self) -> Self {
        Self {
            yes: self.no.clone(),
            no: self.yes.clone(),
        }
    }

    pub fn yes(&self) -> &BTreeSet<String> {
        &self.yes
    }

    pub fn no(&self) -> &BTreeSet<String> {
        &self.no
    }
}

impl Default for AnswerTokens {
    fn default() -> Self {
        Self::new(["yes", "y", "true"], ["no", "n", "false"]).expect("default answer tokens are valid")
    }
}

pub const DEFAULT_TOP_N_TOKENS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct LlmBackendConfig {
    pub endpoint: String,
    pub api_key: Option<String>,
    pub top_n_tokens: usize,
    pub answer_tokens: AnswerTokens,
    pub request_timeout: Duration,
    pub max_in_flight: usize,
    pub limits: PromptLimits,
}

impl LlmBackendConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            api_key: None,
            top_n_tokens: DEFAULT_TOP_N_TOKENS,
            answer_tokens: AnswerTokens::default(),
            request_timeout: Duration::from_secs(60),
            max_in_flight: 4,
            limits: PromptLimits::default(),
        }
    }
}

/// Renders the similarity question for an arbitrary subject string (a raw
/// label or an enrichment sentence).
pub fn render_sts_prompt(
    subject: &str,
    label_set: &[DescriptiveLabel],
    description: &str,
    limits: &PromptLimits,
) -> String {
    let columns = bullet_block(label_set.iter().map(|l| l.text.as_str()), limits.max_context_items);
    let description = truncate_chars(description, limits.max_desc_chars);
    render(
        sts_template(),
        &[("columns", &columns), ("label", subject), ("description", description)],
    )
}

/// The similarity question for a label that belongs to `label_set`.
pub fn build_sts_prompt(
    label: &DescriptiveLabel,
    label_set: &[DescriptiveLabel],
    description: &GlossaryEntry,
    limits: &PromptLimits,
) -> Result<String> {
    if !label_set.contains(label) {
        return Err(Error::InvalidArgument(format!(
            "label {:?} ({}) is not in the label set",
            label.text, label.label_id
        )));
    }
    Ok(render_sts_prompt(&label.text, label_set, &description.text, limits))
}

/// Upper bound, in characters, on a rendered similarity prompt whose label
/// texts (and subject) are at most `max_label_chars` long.
pub fn sts_prompt_char_bound(limits: &PromptLimits, max_label_chars: usize) -> usize {
    let template = sts_template().chars().count();
    let columns = limits.max_context_items * (4 + max_label_chars + 1);
    template + columns + max_label_chars + limits.max_desc_chars
}

/// Converts the first-token distribution into the yes/no probability ratio.
/// Tokens are trimmed and lowercased before lookup.
pub fn score_from_token_distribution(dist: &TokenDistribution, tokens: &AnswerTokens) -> StsScore {
    let mut p_yes = 0.0;
    let mut p_no = 0.0;
    for (token, p) in dist.entries() {
        let norm = token.trim().to_lowercase();
        if tokens.yes.contains(&norm) {
            p_yes += p;
        } else if tokens.no.contains(&norm) {
            p_no += p;
        }
    }
    let mass = p_yes + p_no;
    if mass < MIN_DECISIVE_MASS {
        return StsScore {
            value: UNDETERMINED_SCORE,
            undetermined: true,
        };
    }
    StsScore::new(p_yes / mass)
}

pub fn prompt_hash(prompt: &str) -> String {
    let digest = Sha256::digest(prompt.as_bytes());
    hex::encode(&digest[..8])
}

/// A generative model that reports its first-answer-token distribution.
pub trait LanguageModel: Send + Sync {
    fn first_token_distribution(&self, prompt: &str, top_n: usize) -> Result<TokenDistribution>;
}

impl<T: LanguageModel + ?Sized> LanguageModel for Arc<T> {
    fn first_token_distribution(&self, prompt: &str, top_n: usize) -> Result<TokenDistribution> {
        (**self).first_token_distribution(prompt, top_n)
    }
}

/// Request body of the model wire protocol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmRequest {
    pub prompt: String,
    pub top_n_tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireToken {
    pub token: String,
    pub probability: f64,
}

/// Response body: candidate first tokens, most probable first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmResponse {
    pub tokens: Vec<WireToken>,
}

impl From<&TokenDistribution> for LlmResponse {
    fn from(dist: &TokenDistribution) -> Self {
        Self {
            tokens: dist
                .entries()
                .iter()
                .map(|(t, p)| WireToken {
                    token: t.clone(),
                    probability: *p,
                })
                .collect(),
        }
    }
}

pub fn decode_llm_request(body: &[u8]) -> Result<LlmRequest> {
    serde_json::from_slice(body).map_err(|e| Error::Protocol(format!("malformed model request: {e}")))
}

/// Decodes a response body into a validated distribution.
pub fn decode_llm_response(body: &[u8]) -> Result<TokenDistribution> {
    let resp: LlmResponse =
        serde_json::from_slice(body).map_err(|e| Error::Protocol(format!("malformed model response: {e}")))?;
    TokenDistribution::new(resp.tokens.into_iter().map(|t| (t.token, t.probability)).collect())
        .map_err(|e| Error::Protocol(format!("invalid token distribution: {e}")))
}

/// Model client speaking the JSON wire protocol over a [`Transport`].
pub struct HttpLanguageModel {
    transport: Arc<dyn Transport>,
    config: LlmBackendConfig,
    in_flight: Semaphore,
}

impl HttpLanguageModel {
    pub fn new(transport: Arc<dyn Transport>, config: LlmBackendConfig) -> Self {
        let in_flight = Semaphore::new(config.max_in_flight);
        Self {
            transport,
            config,
            in_flight,
        }
    }

    pub fn config(&self) -> &LlmBackendConfig {
        &self.config
    }
}

impl LanguageModel for HttpLanguageModel {
    fn first_token_distribution(&self, prompt: &str, top_n: usize) -> Result<TokenDistribution> {
        let body = serde_json::to_vec(&LlmRequest {
            prompt: prompt.to_string(),
            top_n_tokens: top_n,
        })
        .expect("request serializes");
        let mut request = HttpRequest::post(&self.config.endpoint, "application/json", body);
        if let Some(key) = &self.config.api_key {
            request = request.header("Authorization", format!("Bearer {key}"));
        }

        let backend_err = |message: String| Error::Backend {
            endpoint: self.config.endpoint.clone(),
            prompt_hash: prompt_hash(prompt),
            message,
        };
        let response = {
            let _permit = self.in_flight.acquire();
            self.transport.send(&request).map_err(|e| backend_err(e.0))?
        };
        if !response.is_success() {
            return Err(backend_err(format!("HTTP status {}", response.status)));
        }
        Ok(decode_llm_response(&response.body)?.truncated(top_n))
    }
}

/// The LLM similarity backend.
pub struct LlmSts {
    model: Arc<dyn LanguageModel>,
    answer_tokens: AnswerTokens,
    top_n_tokens: usize,
    limits: PromptLimits,
}

impl LlmSts {
    pub fn new(model: Arc<dyn LanguageModel>) -> Self {
        Self {
            model,
            answer_tokens: AnswerTokens::default(),
            top_n_tokens: DEFAULT_TOP_N_TOKENS,
            limits: PromptLimits::default(),
        }
    }

    pub fn from_config(model: Arc<dyn LanguageModel>, config: &LlmBackendConfig) -> Self {
        Self {
            model,
            answer_tokens: config.answer_tokens.clone(),
            top_n_tokens: config.top_n_tokens,
            limits: config.limits,
        }
    }

    pub fn with_answer_tokens(mut self, tokens: AnswerTokens) -> Self {
        self.answer_tokens = tokens;
        self
    }

    pub fn with_limits(mut self, limits: PromptLimits) -> Self {
        self.limits = limits;
        self
    }

    /// Scores a label of `label_set` against a description.
    pub fn sts_llm_score(
        &self,
        label: &DescriptiveLabel,
        label_set: &[DescriptiveLabel],
        description: &GlossaryEntry,
    ) -> Result<StsScore> {
        let prompt = build_sts_prompt(label, label_set, description, &self.limits)?;
        self.score_prompt(&prompt)
    }

    fn score_prompt(&self, prompt: &str) -> Result<StsScore> {
        let dist = self.model.first_token_distribution(prompt, self.top_n_tokens)?;
        Ok(score_from_token_distribution(
            &dist.truncated(self.top_n_tokens),
            &self.answer_tokens,
        ))
    }
}

impl SentenceScorer for LlmSts {
    fn score(&self, ctx: &StsContext<'_>, sentence: &str, description: &GlossaryEntry) -> Result<StsScore> {
        // Enrichment sentences take the label's place in the question; the
        // column list still shows the real label set.
        let prompt = render_sts_prompt(sentence, ctx.label_set, &description.text, &self.limits);
        self.score_prompt(&prompt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(pairs: &[(&str, f64)]) -> TokenDistribution {
        TokenDistribution::from_pairs(pairs.iter().map(|(t, p)| (*t, *p))).unwrap()
    }

    #[test]
    fn ratio_examples() {
        let t = AnswerTokens::default();
        let s = score_from_token_distribution(&dist(&[("Yes", 0.6), ("No", 0.2), ("the", 0.1)]), &t);
        assert!((s.value - 0.75).abs() < 1e-15 && !s.undetermined);

        let s = score_from_token_distribution(&dist(&[("no", 0.5), ("No", 0.3), ("yes", 0.2)]), &t);
        assert!((s.value - 0.2).abs() < 1e-15);

        let s = score_from_token_distribution(&dist(&[("maybe", 0.9), ("the", 0.1)]), &t);
        assert_eq!(s.value, 0.5);
        assert!(s.undetermined);
    }

    #[test]
    fn whitespace_tokens_are_trimmed() {
        let t = AnswerTokens::default();
        let s = score_from_token_distribution(&dist(&[(" Yes", 0.3), ("▁no", 0.3), ("\tNO ", 0.1)]), &t);
        assert!((s.value - 0.75).abs() < 1e-15);
    }

    #[test]
    fn distribution_validation() {
        assert!(TokenDistribution::new(vec![]).is_err());
        assert!(TokenDistribution::from_pairs([("a", 0.7), ("a", 0.1)]).is_err());
        assert!(TokenDistribution::from_pairs([("a", 0.7), ("b", 0.4)]).is_err());
        assert!(TokenDistribution::from_pairs([("a", -0.1)]).is_err());
        assert!(TokenDistribution::from_pairs([("a", f64::NAN)]).is_err());
        let d = dist(&[("b", 0.1), ("a", 0.6)]);
        assert_eq!(d.entries()[0].0, "a");
    }

    #[test]
    fn answer_tokens_must_be_disjoint() {
        assert!(AnswerTokens::new(["yes"], ["YES "]).is_err());
        assert!(AnswerTokens::new(Vec::<&str>::new(), ["no"]).is_err());
    }

    #[test]
    fn decode_rejects_garbage() {
        assert!(matches!(decode_llm_response(b"{"), Err(Error::Protocol(_))));
        assert!(matches!(
            decode_llm_response(br#"{"tokens":[]}"#),
            Err(Error::Protocol(_))
        ));
        let d =
            decode_llm_response(br#"{"tokens":[{"token":"No","probability":0.2},{"token":"Yes","probability":0.7}]}"#)
                .unwrap();
        assert_eq!(d.entries()[0], ("Yes".to_string(), 0.7));
    }
}

//! Set-level context score: does a glossary, as a whole, describe a label set?
//!
//! The question is asked once per (label group, glossary group) pair and the
//! answer scored with the same yes/no ratio as the LLM similarity backend.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{DescriptiveLabel, GlossaryEntry, SemanticGroup};
use crate::error::{Error, Result};
use crate::prompt::{bullet_block, render, scc_template, truncate_chars, PromptLimits};
use crate::sts::llm::{score_from_token_distribution, AnswerTokens, LanguageModel, DEFAULT_TOP_N_TOKENS};
use crate::sts::StsScore;
use crate::sync::SingleFlight;

/// Memo key: label-side group and candidate glossary group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContextKey {
    pub label_group: String,
    pub glossary_group: String,
}

impl ContextKey {
    pub fn new(label_group: impl Into<String>, glossary_group: impl Into<String>) -> Result<Self> {
        let key = Self {
            label_group: label_group.into(),
            glossary_group: glossary_group.into(),
        };
        if key.label_group.is_empty() || key.glossary_group.is_empty() {
            return Err(Error::InvalidArgument("context key group ids must be non-empty".into()));
        }
        Ok(key)
    }
}

pub fn build_scc_prompt(
    labels: &[DescriptiveLabel],
    glossary: &[GlossaryEntry],
    limits: &PromptLimits,
) -> Result<String> {
    if labels.is_empty() || glossary.is_empty() {
        return Err(Error::InvalidArgument(
            "context prompt needs at least one label and one glossary entry".into(),
        ));
    }
    let columns = bullet_block(labels.iter().map(|l| l.text.as_str()), limits.max_context_items);
    let terms = bullet_block(
        glossary.iter().map(|g| truncate_chars(&g.text, limits.max_desc_chars)),
        limits.max_context_items,
    );
    Ok(render(
        scc_template(),
        &[("columns", &columns), ("glossary_terms", &terms)],
    ))
}

/// Memoizing context scorer. Concurrent requests for one key share a single
/// backend call.
pub struct ContextScorer {
    model: Arc<dyn LanguageModel>,
    answer_tokens: AnswerTokens,
    top_n_tokens: usize,
    limits: PromptLimits,
    memo: SingleFlight<ContextKey, StsScore>,
    backend_calls: AtomicUsize,
}

impl ContextScorer {
    pub fn new(model: Arc<dyn LanguageModel>) -> Self {
        Self {
            model,
            answer_tokens: AnswerTokens::default(),
            top_n_tokens: DEFAULT_TOP_N_TOKENS,
            limits: PromptLimits::default(),
            memo: SingleFlight::new(),
            backend_calls: AtomicUsize::new(0),
        }
    }

    pub fn with_answer_tokens(mut self, tokens: AnswerTokens) -> Self {
        self.answer_tokens = tokens;
        self
    }

    pub fn with_top_n(mut self, top_n: usize) -> Self {
        self.top_n_tokens = top_n.max(1);
        self
    }

    pub fn with_limits(mut self, limits: PromptLimits) -> Self {
        self.limits = limits;
        self
    }

    /// Context score for the label set of `label_group` against the glossary
    /// of `glossary_group`.
    pub fn context_score(&self, label_group: &SemanticGroup, glossary_group: &SemanticGroup) -> Result<StsScore> {
        let key = ContextKey::new(&label_group.group_id, &glossary_group.group_id)?;
        let attach = |e: Error| Error::Context {
            label_group: key.label_group.clone(),
            glossary_group: key.glossary_group.clone(),
            source: Box::new(e),
        };
        let (score, _) = self
            .memo
            .get_or_try_insert(key.clone(), || {
                let prompt = build_scc_prompt(&label_group.labels, &glossary_group.glossary, &self.limits)?;
                self.backend_calls.fetch_add(1, Ordering::SeqCst);
                let dist = self.model.first_token_distribution(&prompt, self.top_n_tokens)?;
                Ok(score_from_token_distribution(
                    &dist.truncated(self.top_n_tokens),
                    &self.answer_tokens,
                ))
            })
            .map_err(attach)?;
        Ok(score)
    }

    /// Number of prompts actually sent to the model.
    pub fn backend_calls(&self) -> usize {
        self.backend_calls.load(Ordering::SeqCst)
    }
}

/// The context factor of the total score: 1 when disabled.
pub fn context_factor(
    scorer: Option<&ContextScorer>,
    enabled: bool,
    label_group: &SemanticGroup,
    glossary_group: &SemanticGroup,
) -> Result<StsScore> {
    if !enabled {
        return Ok(StsScore::new(1.0));
    }
    match scorer {
        Some(s) => s.context_score(label_group, glossary_group),
        None => Err(Error::InvalidArgument(
            "context scoring is enabled but no language model is configured".into(),
        )),
    }
}

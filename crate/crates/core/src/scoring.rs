//! Score composition and candidate ranking.
//!
//! The text score is the best similarity over the enrichment sentences of a
//! label; the total multiplies it by the context score of the two groups.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{DescriptiveLabel, GlossaryEntry, MatchConfig, SemanticGroup, StsBackendKind};
use crate::error::{Error, Result};
use crate::lse::{enrich_with, EnrichOptions, EnrichmentResult, KnowledgeSource, NoKnowledge};
use crate::scc::{context_factor, ContextScorer};
use crate::sts::tfidf::{CorpusStats, TfidfSts};
use crate::sts::{SentenceScorer, StsContext};
use crate::sync::SingleFlight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Undetermined {
    Sts,
    Scc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextScore {
    pub score: f64,
    pub best_sentence: String,
    pub undetermined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub text_score: f64,
    pub context_score: f64,
    pub total: f64,
    pub best_sentence: String,
    pub undetermined: BTreeSet<Undetermined>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidates {
    /// `(candidate_index, breakdown)`, best first.
    pub ranking: Vec<(usize, ScoreBreakdown)>,
    pub rank_of_truth: usize,
}

/// The label side of a comparison: a label and the group it belongs to.
#[derive(Debug, Clone, Copy)]
pub struct LabelSide<'a> {
    pub label: &'a DescriptiveLabel,
    pub group: &'a SemanticGroup,
}

/// One candidate: a description and the glossary it comes from.
#[derive(Debug, Clone, Copy)]
pub struct CandidateRef<'a> {
    pub description: &'a GlossaryEntry,
    pub glossary: &'a SemanticGroup,
}

type EnrichKey = (String, String, bool, bool, usize);

/// Holds the backends and the per-run enrichment memo.
pub struct Matcher {
    tfidf: Arc<dyn SentenceScorer>,
    embedding: Option<Arc<dyn SentenceScorer>>,
    llm: Option<Arc<dyn SentenceScorer>>,
    knowledge: Arc<dyn KnowledgeSource>,
    context: Option<Arc<ContextScorer>>,
    max_results: usize,
    enrichments: SingleFlight<EnrichKey, Arc<EnrichmentResult>>,
}

impl Default for Matcher {
    fn default() -> Self {
        Self::new()
    }
}

impl Matcher {
    /// TFIDF only, no knowledge, no context model.
    pub fn new() -> Self {
        Self {
            tfidf: Arc::new(TfidfSts),
            embedding: None,
            llm: None,
            knowledge: Arc::new(NoKnowledge),
            context: None,
            max_results: crate::lse::DEFAULT_MAX_RESULTS,
            enrichments: SingleFlight::new(),
        }
    }

    pub fn with_sts(mut self, kind: StsBackendKind, scorer: Arc<dyn SentenceScorer>) -> Self {
        match kind {
            StsBackendKind::Tfidf => self.tfidf = scorer,
            StsBackendKind::Embedding => self.embedding = Some(scorer),
            StsBackendKind::Llm => self.llm = Some(scorer),
        }
        self
    }

    pub fn with_knowledge(mut self, knowledge: Arc<dyn KnowledgeSource>) -> Self {
        self.knowledge = knowledge;
        self
    }

    pub fn with_context(mut self, context: Arc<ContextScorer>) -> Self {
        self.context = Some(context);
        self
    }

    pub fn with_max_results(mut self, max_results: usize) -> Self {
        self.max_results = max_results;
        self
    }

    pub fn context_scorer(&self) -> Option<&Arc<ContextScorer>> {
        self.context.as_ref()
    }

    /// Whether every backend `config` needs is present.
    pub fn supports(&self, config: &MatchConfig) -> Result<()> {
        let missing = match config.sts_backend {
            StsBackendKind::Tfidf => None,
            StsBackendKind::Embedding => self.embedding.is_none().then_some("embedding"),
            StsBackendKind::Llm => self.llm.is_none().then_some("LLM"),
        };
        if let Some(what) = missing {
            return Err(Error::InvalidArgument(format!(
                "{config}: no {what} backend configured"
            )));
        }
        if config.scc_enabled && self.context.is_none() {
            return Err(Error::InvalidArgument(format!("{config}: no context model configured")));
        }
        Ok(())
    }

    fn sts(&self, kind: StsBackendKind) -> Result<&dyn SentenceScorer> {
        let scorer = match kind {
            StsBackendKind::Tfidf => Some(&self.tfidf),
            StsBackendKind::Embedding => self.embedding.as_ref(),
            StsBackendKind::Llm => self.llm.as_ref(),
        };
        scorer
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::InvalidArgument(format!("no {kind:?} backend configured")))
    }

    /// Enrichment sentences for a label, memoized for the run.
    pub fn enrich(&self, label: &DescriptiveLabel, config: &MatchConfig) -> Result<Arc<EnrichmentResult>> {
        let mut options = EnrichOptions::from_config(config);
        options.max_results = self.max_results;
        let key = (
            label.label_id.clone(),
            label.text.clone(),
            options.lse_enabled,
            options.include_raw_label,
            options.max_results,
        );
        let (result, _) = self.enrichments.get_or_try_insert(key, || {
            enrich_with(label, &options, self.knowledge.as_ref()).map(Arc::new)
        })?;
        Ok(result)
    }

    /// Best similarity over the label's enrichment sentences, with the
    /// sentence that achieved it (first one on ties).
    pub fn text_similarity_score(
        &self,
        side: LabelSide<'_>,
        description: &GlossaryEntry,
        corpus: &CorpusStats,
        config: &MatchConfig,
    ) -> Result<TextScore> {
        let sts = self.sts(config.sts_backend)?;
        let enrichment = self.enrich(side.label, config)?;
        let ctx = StsContext {
            label: side.label,
            label_set: &side.group.labels,
            corpus,
        };
        let mut best: Option<(f64, &str, bool)> = None;
        for sentence in &enrichment.sentences {
            let s = sts.score(&ctx, sentence, description)?;
            if best.is_none_or(|(v, _, _)| s.value > v) {
                best = Some((s.value, sentence, s.undetermined));
            }
        }
        Ok(match best {
            Some((score, sentence, undetermined)) => TextScore {
                score,
                best_sentence: sentence.to_string(),
                undetermined,
            },
            None => TextScore {
                score: 0.0,
                best_sentence: String::new(),
                undetermined: false,
            },
        })
    }

    pub fn dld_score(
        &self,
        side: LabelSide<'_>,
        candidate: CandidateRef<'_>,
        corpus: &CorpusStats,
        config: &MatchConfig,
    ) -> Result<ScoreBreakdown> {
        let text = self.text_similarity_score(side, candidate.description, corpus, config)?;
        let context = context_factor(
            self.context.as_deref(),
            config.scc_enabled,
            side.group,
            candidate.glossary,
        )?;
        let mut undetermined = BTreeSet::new();
        if text.undetermined {
            undetermined.insert(Undetermined::Sts);
        }
        if context.undetermined {
            undetermined.insert(Undetermined::Scc);
        }
        Ok(ScoreBreakdown {
            text_score: text.score,
            context_score: context.value,
            total: text.score * context.value,
            best_sentence: text.best_sentence,
            undetermined,
        })
    }

    /// Scores every candidate and orders them best first (ties by index).
    pub fn score_candidates(
        &self,
        side: LabelSide<'_>,
        candidates: &[CandidateRef<'_>],
        config: &MatchConfig,
    ) -> Result<Vec<(usize, ScoreBreakdown)>> {
        if candidates.is_empty() {
            return Err(Error::InvalidArgument("no candidates to score".into()));
        }
        let corpus = CorpusStats::from_texts(candidates.iter().map(|c| c.description.text.as_str()))?;
        let mut scored = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| Ok((i, self.dld_score(side, *c, &corpus, config)?)))
            .collect::<Result<Vec<_>>>()?;
        order_by_total(&mut scored);
        Ok(scored)
    }

    pub fn rank_candidates(
        &self,
        side: LabelSide<'_>,
        candidates: &[CandidateRef<'_>],
        truth_index: usize,
        config: &MatchConfig,
    ) -> Result<RankedCandidates> {
        if candidates.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "ranking needs at least 2 candidates, got {}",
                candidates.len()
            )));
        }
        if truth_index >= candidates.len() {
            return Err(Error::InvalidArgument(format!(
                "truth index {truth_index} out of range for {} candidates",
                candidates.len()
            )));
        }
        let ranking = self.score_candidates(side, candidates, config)?;
        let mut totals = vec![0.0; candidates.len()];
        for (i, b) in &ranking {
            totals[*i] = b.total;
        }
        Ok(RankedCandidates {
            rank_of_truth: pessimistic_rank(&totals, truth_index),
            ranking,
        })
    }
}

/// Sorts by total descending, ties by ascending candidate index.
pub fn order_by_total(scored: &mut [(usize, ScoreBreakdown)]) {
    scored.sort_by(|(ia, a), (ib, b)| b.total.total_cmp(&a.total).then(ia.cmp(ib)));
}

/// `1 + |{distractors scoring at least as high as the truth}|`.
pub fn pessimistic_rank(totals: &[f64], truth_index: usize) -> usize {
    let truth = totals[truth_index];
    1 + totals
        .iter()
        .enumerate()
        .filter(|(i, t)| *i != truth_index && **t >= truth)
        .count()
}

//! Semantic text similarity backends.
//!
//! Every backend scores one enrichment sentence against one glossary
//! description. The surrounding [`StsContext`] carries what some backends
//! need beyond the two strings: the label set for the LLM prompt and the
//! candidate-description corpus statistics for TFIDF.

pub mod embedding;
pub mod llm;
pub mod tfidf;

use crate::domain::{DescriptiveLabel, GlossaryEntry};
use crate::error::Result;

pub use tfidf::CorpusStats;

/// A similarity score, flagged when the backend could not decide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StsScore {
    pub value: f64,
    pub undetermined: bool,
}

impl StsScore {
    pub fn new(value: f64) -> Self {
        Self {
            value,
            undetermined: false,
        }
    }
}

/// Per-instance context for scoring.
#[derive(Debug, Clone, Copy)]
pub struct StsContext<'a> {
    pub label: &'a DescriptiveLabel,
    pub label_set: &'a [DescriptiveLabel],
    /// Statistics over the candidate descriptions of the current instance.
    pub corpus: &'a CorpusStats,
}

pub trait SentenceScorer: Send + Sync {
    fn score(&self, ctx: &StsContext<'_>, sentence: &str, description: &GlossaryEntry) -> Result<StsScore>;
}

impl<F> SentenceScorer for F
where
    F: Fn(&StsContext<'_>, &str, &GlossaryEntry) -> Result<StsScore> + Send + Sync,
{
    fn score(&self, ctx: &StsContext<'_>, sentence: &str, description: &GlossaryEntry) -> Result<StsScore> {
        self(ctx, sentence, description)
    }
}

//! TFIDF similarity with a tokenizer tuned for cryptic identifiers.
//!
//! Weights are raw term counts times smoothed idf,
//! `ln((1 + n) / (1 + df)) + 1`, and the score is the cosine of the two
//! weight vectors. Corpus statistics come from the candidate descriptions of
//! the instance being ranked.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{SentenceScorer, StsContext, StsScore};
use crate::domain::GlossaryEntry;
use crate::error::{Error, Result};

/// Lowercase tokens in source order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TokenizedText {
    tokens: Vec<String>,
}

impl TokenizedText {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Wraps already-normalized tokens; empty fragments are dropped and the
    /// rest lowercased so the invariant holds.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            tokens: tokens
                .into_iter()
                .map(|t| t.as_ref().to_lowercase())
                .filter(|t| !t.is_empty())
                .collect(),
        }
    }

    fn term_counts(&self) -> BTreeMap<&str, u32> {
        let mut counts = BTreeMap::new();
        for t in &self.tokens {
            *counts.entry(t.as_str()).or_insert(0) += 1;
        }
        counts
    }
}

#[derive(Clone, Copy, PartialEq)]
enum CharClass {
    Lower,
    Upper,
    Digit,
    Other,
}

fn classify(c: char) -> CharClass {
    if c.is_numeric() {
        CharClass::Digit
    } else if c.is_uppercase() {
        CharClass::Upper
    } else if c.is_alphabetic() {
        // Includes caseless letters (CJK etc.).
        CharClass::Lower
    } else {
        CharClass::Other
    }
}

/// Splits on non-alphanumerics, lower-to-upper camelCase boundaries and
/// letter/digit transitions, then lowercases. No stemming, no stop words.
///
/// `"LOAN_AMT"` becomes `["loan", "amt"]`, `"isFlaggedFraud"` becomes
/// `["is", "flagged", "fraud"]`.
pub fn tokenize(text: &str) -> TokenizedText {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut prev = CharClass::Other;

    for c in text.chars() {
        let class = classify(c);
        let boundary = matches!(
            (prev, class),
            (_, CharClass::Other)
                | (CharClass::Lower, CharClass::Upper)
                | (CharClass::Digit, CharClass::Lower | CharClass::Upper)
                | (CharClass::Lower | CharClass::Upper, CharClass::Digit)
        );
        if boundary && !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
        if class != CharClass::Other {
            current.extend(c.to_lowercase());
        }
        prev = class;
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    TokenizedText { tokens }
}

/// Document frequencies over a fixed corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    doc_count: usize,
    doc_frequency: BTreeMap<String, usize>,
}

impl CorpusStats {
    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn doc_frequency(&self, token: &str) -> usize {
        self.doc_frequency.get(token).copied().unwrap_or(0)
    }

    pub fn frequencies(&self) -> &BTreeMap<String, usize> {
        &self.doc_frequency
    }

    pub fn idf(&self, token: &str) -> f64 {
        let n = self.doc_count as f64;
        let df = self.doc_frequency(token) as f64;
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }

    /// Convenience for a corpus of raw description strings.
    pub fn from_texts<'a, I: IntoIterator<Item = &'a str>>(texts: I) -> Result<Self> {
        let docs: Vec<TokenizedText> = texts.into_iter().map(tokenize).collect();
        build_corpus_stats(&docs)
    }
}

pub fn build_corpus_stats(documents: &[TokenizedText]) -> Result<CorpusStats> {
    if documents.is_empty() {
        return Err(Error::InvalidArgument(
            "corpus statistics need at least one document".into(),
        ));
    }
    let mut doc_frequency = BTreeMap::new();
    for doc in documents {
        for token in doc.term_counts().into_keys() {
            *doc_frequency.entry(token.to_string()).or_insert(0) += 1;
        }
    }
    Ok(CorpusStats {
        doc_count: documents.len(),
        doc_frequency,
    })
}

/// Cosine similarity of the tf-idf vectors of `a` and `b`, in `[0, 1]`.
/// Zero when either vector is all-zero.
pub fn tfidf_similarity(a: &TokenizedText, b: &TokenizedText, stats: &CorpusStats) -> f64 {
    let ta = a.term_counts();
    let tb = b.term_counts();
    if ta.is_empty() || tb.is_empty() {
        return 0.0;
    }

    // Iterate in sorted-token order so the sums are identical whichever
    // argument comes first.
    let mut dot = 0.0;
    for (token, &ca) in &ta {
        if let Some(&cb) = tb.get(token) {
            let idf = stats.idf(token);
            dot += (ca as f64 * idf) * (cb as f64 * idf);
        }
    }
    let norm_sq = |counts: &BTreeMap<&str, u32>| -> f64 {
        counts
            .iter()
            .map(|(t, &c)| {
                let w = c as f64 * stats.idf(t);
                w * w
            })
            .sum()
    };
    let na = norm_sq(&ta);
    let nb = norm_sq(&tb);
    if dot == 0.0 || na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb).sqrt()).clamp(0.0, 1.0)
}

/// The TFIDF backend. Stateless; corpus statistics arrive with the context.
#[derive(Debug, Clone, Copy, Default)]
pub struct TfidfSts;

impl SentenceScorer for TfidfSts {
    fn score(&self, ctx: &StsContext<'_>, sentence: &str, description: &GlossaryEntry) -> Result<StsScore> {
        Ok(StsScore::new(tfidf_similarity(
            &tokenize(sentence),
            &tokenize(&description.text),
            ctx.corpus,
        )))
    }
}

//! Sentence-embedding similarity backed by an external embedding service.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::{SentenceScorer, StsContext, StsScore};
use crate::domain::GlossaryEntry;
use crate::error::{Error, Result};
use crate::sync::SingleFlight;
use crate::transport::{HttpRequest, Transport};

/// Largest number of texts sent in one embedding request.
pub const MAX_BATCH: usize = 64;

const MIN_NORM: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceVector {
    values: Vec<f64>,
}

impl SentenceVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("sentence vector has dimension 0".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("sentence vector has non-finite entries".into()));
        }
        Ok(Self { values })
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// All-zero vectors carry no direction.
    pub fn is_degenerate(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }
}

/// `dot(a, b) / (|a| |b|)`, or 0 when either norm is (near) zero.
pub fn cosine_similarity(a: &SentenceVector, b: &SentenceVector) -> Result<f64> {
    if a.dimension() != b.dimension() {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: {} vs {}",
            a.dimension(),
            b.dimension()
        )));
    }
    let dot: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    let na: f64 = a.values.iter().map(|x| x * x).sum();
    let nb: f64 = b.values.iter().map(|x| x * x).sum();
    if na.sqrt() < MIN_NORM || nb.sqrt() < MIN_NORM {
        return Ok(0.0);
    }
    Ok((dot / (na * nb).sqrt()).clamp(-1.0, 1.0))
}

pub trait Embedder: Send + Sync {
    /// One vector per input text, in input order.
    fn embed(&self, texts: &[String]) -> Result<Vec<SentenceVector>>;
}

impl<T: Embedder + ?Sized> Embedder for Arc<T> {
    fn embed(&self, texts: &[String]) -> Result<Vec<SentenceVector>> {
        (**self).embed(texts)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingRequest {
    pub texts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingResponse {
    pub vectors: Vec<Vec<f64>>,
    pub dimension: usize,
}

pub fn decode_embedding_request(body: &[u8]) -> Result<EmbeddingRequest> {
    serde_json::from_slice(body).map_err(|e| Error::Protocol(format!("malformed embedding request: {e}")))
}

/// Decodes and checks a response: every vector must have the declared
/// dimension, and there must be `expected` of them.
pub fn decode_embedding_response(body: &[u8], expected: usize) -> Result<Vec<SentenceVector>> {
    let resp: EmbeddingResponse =
        serde_json::from_slice(body).map_err(|e| Error::Protocol(format!("malformed embedding response: {e}")))?;
    if resp.vectors.len() != expected {
        return Err(Error::Protocol(format!(
            "expected {expected} vectors, got {}",
            resp.vectors.len()
        )));
    }
    resp.vectors
        .into_iter()
        .map(|v| {
            if v.len() != resp.dimension {
                return Err(Error::Protocol(format!(
                    "vector of length {} in a response declaring dimension {}",
                    v.len(),
                    resp.dimension
                )));
            }
            SentenceVector::new(v).map_err(|e| Error::Protocol(e.to_string()))
        })
        .collect()
}

/// Embedding client over the JSON wire protocol.
pub struct HttpEmbedder {
    transport: Arc<dyn Transport>,
    endpoint: String,
}

impl HttpEmbedder {
    pub fn new(transport: Arc<dyn Transport>, endpoint: impl Into<String>) -> Self {
        Self {
            transport,
            endpoint: endpoint.into(),
        }
    }
}

impl Embedder for HttpEmbedder {
    fn embed(&self, texts: &[String]) -> Result<Vec<SentenceVector>> {
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(MAX_BATCH) {
            let body = serde_json::to_vec(&EmbeddingRequest { texts: chunk.to_vec() }).expect("request serializes");
            let request = HttpRequest::post(&self.endpoint, "application/json", body);
            let backend_err = |message: String| Error::Backend {
                endpoint: self.endpoint.clone(),
                prompt_hash: super::llm::prompt_hash(&chunk.join("\n")),
                message,
            };
            let response = self.transport.send(&request).map_err(|e| backend_err(e.0))?;
            if !response.is_success() {
                return Err(backend_err(format!("HTTP status {}", response.status)));
            }
            out.extend(decode_embedding_response(&response.body, chunk.len())?);
        }
        Ok(out)
    }
}

/// The embedding similarity backend, with a per-run vector cache keyed by
/// exact string.
pub struct EmbeddingSts {
    embedder: Arc<dyn Embedder>,
    cache: SingleFlight<String, Arc<SentenceVector>>,
    dimension: OnceLock<usize>,
}

impl EmbeddingSts {
    pub fn new(embedder: Arc<dyn Embedder>) -> Self {
        Self {
            embedder,
            cache: SingleFlight::new(),
            dimension: OnceLock::new(),
        }
    }

    fn check_dimension(&self, v: &SentenceVector) -> Result<()> {
        let expected = *self.dimension.get_or_init(|| v.dimension());
        if v.dimension() != expected {
            return Err(Error::Protocol(format!(
                "embedding dimension drifted from {expected} to {}",
                v.dimension()
            )));
        }
        Ok(())
    }

    pub fn vector(&self, text: &str) -> Result<Arc<SentenceVector>> {
        let (v, _) = self.cache.get_or_try_insert(text.to_string(), || {
            let mut vs = self.embedder.embed(&[text.to_string()])?;
            if vs.len() != 1 {
                return Err(Error::Protocol(format!("expected 1 vector, got {}", vs.len())));
            }
            let v = vs.pop().expect("one vector");
            self.check_dimension(&v)?;
            Ok(Arc::new(v))
        })?;
        Ok(v)
    }

    /// Embeds every uncached text in batches of up to [`MAX_BATCH`].
    pub fn prefetch<'a>(&self, texts: impl IntoIterator<Item = &'a str>) -> Result<()> {
        let mut missing: Vec<String> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for t in texts {
            if self.cache.get(&t.to_string()).is_none() && seen.insert(t) {
                missing.push(t.to_string());
            }
        }
        for chunk in missing.chunks(MAX_BATCH) {
            let vectors = self.embedder.embed(chunk)?;
            if vectors.len() != chunk.len() {
                return Err(Error::Protocol(format!(
                    "expected {} vectors, got {}",
                    chunk.len(),
                    vectors.len()
                )));
            }
            for (text, v) in chunk.iter().zip(vectors) {
                self.check_dimension(&v)?;
                let v = Arc::new(v);
                self.cache.get_or_try_insert(text.clone(), || Ok::<_, Error>(v))?;
            }
        }
        Ok(())
    }

    /// Cosine of the two embeddings, clamped to `[0, 1]`.
    pub fn sts_embedding_score(&self, sentence: &str, description: &str) -> Result<f64> {
        let a = self.vector(sentence)?;
        let b = self.vector(description)?;
        Ok(cosine_similarity(&a, &b)?.clamp(0.0, 1.0))
    }

    pub fn cached_vectors(&self) -> usize {
        self.cache.len()
    }
}

impl SentenceScorer for EmbeddingSts {
    fn score(&self, _ctx: &StsContext<'_>, sentence: &str, description: &GlossaryEntry) -> Result<StsScore> {
        Ok(StsScore::new(self.sts_embedding_score(sentence, &description.text)?))
    }
}

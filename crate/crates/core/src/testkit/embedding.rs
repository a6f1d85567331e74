//! Deterministic embedder and an embedding-protocol stub.

use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::sts::embedding::{decode_embedding_request, Embedder, EmbeddingResponse, SentenceVector};
use crate::sts::tfidf::tokenize;
use crate::transport::{HttpRequest, HttpResponse, Transport, TransportError};

use super::llm::json_response;

/// Signed feature hashing of word tokens. Texts sharing words get positive
/// cosine; texts with no tokens map to the zero vector.
#[derive(Debug, Clone, Copy)]
pub struct HashingEmbedder {
    pub dimension: usize,
}

impl Default for HashingEmbedder {
    fn default() -> Self {
        Self { dimension: 64 }
    }
}

impl HashingEmbedder {
    pub fn new(dimension: usize) -> Self {
        Self {
            dimension: dimension.max(1),
        }
    }

    pub fn vector(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.dimension];
        for token in tokenize(text).tokens() {
            let h = Sha256::digest(token.as_bytes());
            let bucket = u64::from_le_bytes(h[..8].try_into().unwrap()) as usize % self.dimension;
            let sign = if h[8] & 1 == 0 { 1.0 } else { -1.0 };
            v[bucket] += sign;
        }
        v
    }
}

impl Embedder for HashingEmbedder {
    fn embed(&self, texts: &[String]) -> Result<Vec<SentenceVector>> {
        texts.iter().map(|t| SentenceVector::new(self.vector(t))).collect()
    }
}

/// Serves the embedding wire protocol from any [`Embedder`].
pub struct EmbeddingStubTransport<E> {
    embedder: E,
}

impl<E: Embedder> EmbeddingStubTransport<E> {
    pub fn new(embedder: E) -> Self {
        Self { embedder }
    }
}

impl<E: Embedder> Transport for EmbeddingStubTransport<E> {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let req = match decode_embedding_request(&request.body) {
            Ok(r) => r,
            Err(e) => return Ok(json_response(400, &serde_json::json!({ "error": e.to_string() }))),
        };
        match self.embedder.embed(&req.texts) {
            Ok(vectors) => {
                let dimension = vectors.first().map(SentenceVector::dimension).unwrap_or(0);
                Ok(json_response(
                    200,
                    &EmbeddingResponse {
                        vectors: vectors.iter().map(|v| v.values().to_vec()).collect(),
                        dimension,
                    },
                ))
            }
            Err(e) => Ok(json_response(500, &serde_json::json!({ "error": e.to_string() }))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sts::embedding::{cosine_similarity, HttpEmbedder};
    use std::sync::Arc;

    #[test]
    fn shared_words_are_similar() {
        let e = HashingEmbedder::default();
        let v = e
            .embed(&["loan amount".into(), "amount of the loan".into(), "zzz".into()])
            .unwrap();
        assert!(cosine_similarity(&v[0], &v[1]).unwrap() > 0.5);
        assert_eq!(e.vector(""), vec![0.0; 64]);
    }

    #[test]
    fn stub_round_trip_in_batches() {
        let http = HttpEmbedder::new(
            Arc::new(EmbeddingStubTransport::new(HashingEmbedder::new(16))),
            "http://stub/embed",
        );
        let texts: Vec<String> = (0..150).map(|i| format!("text {i}")).collect();
        let v = http.embed(&texts).unwrap();
        assert_eq!(v.len(), 150);
        assert_eq!(v[149].values(), HashingEmbedder::new(16).vector("text 149").as_slice());
    }
}

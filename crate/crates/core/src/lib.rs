//! Descriptive-label-to-description matching.
//!
//! Given a label set and candidate glossaries, score each (label, description)
//! pair with a text-similarity backend, optionally enriched with sentences
//! from an external knowledge base and weighted by a set-level context score.

pub mod bench;
pub mod config;
pub mod domain;
pub mod error;
pub mod ingest;
pub mod lse;
pub mod prompt;
pub mod scc;
pub mod scoring;
pub mod sts;
pub mod sync;
pub mod testkit;
pub mod transport;

pub use domain::{Dataset, DescriptiveLabel, GlossaryEntry, MatchConfig, SemanticGroup, StsBackendKind};
pub use error::{Error, Result};

//! Datasets of semantic groups: label lists aligned index-wise with glossaries.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One natural-language description in a glossary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GlossaryEntry {
    pub entry_id: String,
    pub text: String,
}

impl GlossaryEntry {
    pub fn new(entry_id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            entry_id: entry_id.into(),
            text: text.into(),
        }
    }
}

/// A raw, possibly cryptic label such as a column name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DescriptiveLabel {
    pub label_id: String,
    pub text: String,
}

impl DescriptiveLabel {
    pub fn new(label_id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            label_id: label_id.into(),
            text: text.into(),
        }
    }
}

/// A label list and its glossary. `labels[p]` is described by `glossary[p]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticGroup {
    pub group_id: String,
    pub labels: Vec<DescriptiveLabel>,
    pub glossary: Vec<GlossaryEntry>,
}

impl SemanticGroup {
    /// Builds a group from aligned `(label, description)` pairs, generating
    /// `"{group_id}:{index}"` identifiers.
    pub fn from_pairs<I, L, D>(group_id: impl Into<String>, pairs: I) -> Self
    where
        I: IntoIterator<Item = (L, D)>,
        L: Into<String>,
        D: Into<String>,
    {
        let group_id = group_id.into();
        let mut labels = Vec::new();
        let mut glossary = Vec::new();
        for (index, (label, description)) in pairs.into_iter().enumerate() {
            let id = generated_id(&group_id, index);
            labels.push(DescriptiveLabel::new(id.clone(), label));
            glossary.push(GlossaryEntry::new(id, description));
        }
        Self {
            group_id,
            labels,
            glossary,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The index-aligned `(label, description)` pair at position `index`.
    pub fn true_pair(&self, index: usize) -> Result<(&DescriptiveLabel, &GlossaryEntry)> {
        match (self.labels.get(index), self.glossary.get(index)) {
            (Some(label), Some(entry)) => Ok((label, entry)),
            _ => Err(Error::IndexOutOfRange {
                group_id: self.group_id.clone(),
                index,
                len: self.labels.len().min(self.glossary.len()),
            }),
        }
    }
}

/// Free-function form of [`SemanticGroup::true_pair`].
pub fn true_pair(group: &SemanticGroup, index: usize) -> Result<(&DescriptiveLabel, &GlossaryEntry)> {
    group.true_pair(index)
}

pub(crate) fn generated_id(group_id: &str, index: usize) -> String {
    format!("{group_id}:{index}")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub groups: Vec<SemanticGroup>,
}

impl Dataset {
    pub fn new(groups: Vec<SemanticGroup>) -> Self {
        Self { groups }
    }

    pub fn entry_count(&self) -> usize {
        self.groups.iter().map(|g| g.labels.len()).sum()
    }

    pub fn group(&self, group_id: &str) -> Option<&SemanticGroup> {
        self.groups.iter().find(|g| g.group_id == group_id)
    }
}

/// Checks every structural invariant and reports one message per violation.
/// An empty list means the dataset is valid.
pub fn validate_dataset(dataset: &Dataset) -> Vec<String> {
    let mut violations = Vec::new();
    let mut seen_groups = HashSet::new();

    for (gi, group) in dataset.groups.iter().enumerate() {
        let gid = &group.group_id;
        if gid.trim().is_empty() {
            violations.push(format!("group at index {gi}: empty group_id"));
        }
        if !seen_groups.insert(gid.as_str()) {
            violations.push(format!("group {gid}: duplicate group_id at index {gi}"));
        }
        if group.labels.len() != group.glossary.len() {
            violations.push(format!(
                "group {gid}: |labels|={} != |glossary|={}",
                group.labels.len(),
                group.glossary.len()
            ));
        }

        let mut label_ids = HashSet::new();
        for (p, label) in group.labels.iter().enumerate() {
            if label.text.trim().is_empty() {
                violations.push(format!("group {gid}: label {p} has empty text"));
            }
            if !label_ids.insert(label.label_id.as_str()) {
                violations.push(format!(
                    "group {gid}: duplicate label_id {:?} at index {p}",
                    label.label_id
                ));
            }
        }

        let mut entry_ids = HashSet::new();
        for (p, entry) in group.glossary.iter().enumerate() {
            if entry.text.trim().is_empty() {
                violations.push(format!("group {gid}: glossary entry {p} has empty text"));
            }
            if !entry_ids.insert(entry.entry_id.as_str()) {
                violations.push(format!(
                    "group {gid}: duplicate entry_id {:?} at index {p}",
                    entry.entry_id
                ));
            }
        }
    }
    violations
}

/// Which text-similarity model scores sentence/description pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StsBackendKind {
    Tfidf,
    Embedding,
    Llm,
}

impl StsBackendKind {
    pub const ALL: [StsBackendKind; 3] = [Self::Tfidf, Self::Embedding, Self::Llm];

    pub fn code(self) -> &'static str {
        match self {
            Self::Tfidf => "T",
            Self::Embedding => "P",
            Self::Llm => "L",
        }
    }
}

/// The switches of one matching configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchConfig {
    pub sts_backend: StsBackendKind,
    pub lse_enabled: bool,
    pub scc_enabled: bool,
    /// Keep the raw label among the enrichment sentences.
    pub include_raw_label: bool,
}

impl MatchConfig {
    pub fn new(sts_backend: StsBackendKind, lse_enabled: bool, scc_enabled: bool) -> Self {
        Self {
            sts_backend,
            lse_enabled,
            scc_enabled,
            include_raw_label: true,
        }
    }

    /// All twelve combinations in table order: `T, T-LSE, T-SCC, T-LSE-SCC, P, ...`.
    pub fn all() -> Vec<MatchConfig> {
        let mut out = Vec::with_capacity(12);
        for backend in StsBackendKind::ALL {
            for (lse, scc) in [(false, false), (true, false), (false, true), (true, true)] {
                out.push(MatchConfig::new(backend, lse, scc));
            }
        }
        out
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MatchConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.sts_backend.code())?;
        if self.lse_enabled {
            f.write_str("-LSE")?;
        }
        if self.scc_enabled {
            f.write_str("-SCC")?;
        }
        Ok(())
    }
}

impl FromStr for MatchConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown config name {s:?} (expected {{T|P|L}}[-LSE][-SCC])"));
        let mut parts = s.split('-');
        let backend = match parts.next() {
            Some("T") => StsBackendKind::Tfidf,
            Some("P") => StsBackendKind::Embedding,
            Some("L") => StsBackendKind::Llm,
            _ => return Err(bad()),
        };
        let rest: Vec<&str> = parts.collect();
        let (lse, scc) = match rest.as_slice() {
            [] => (false, false),
            ["LSE"] => (true, false),
            ["SCC"] => (false, true),
            ["LSE", "SCC"] => (true, true),
            _ => return Err(bad()),
        };
        Ok(MatchConfig::new(backend, lse, scc))
    }
}

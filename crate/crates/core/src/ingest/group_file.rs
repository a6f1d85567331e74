//! JSON group-file format.
//!
//! A dataset file is `{"groups": [GROUP, ...]}`; a directory holds one GROUP
//! per `*.json` file, read in file-name order. A GROUP is
//!
//! ```json
//! {"group_id": "cars", "entries": [{"label": "MPG", "description": "miles per gallon"}]}
//! ```
//!
//! Entries may carry `label_id` / `entry_id`; when absent they are generated
//! as `"{group_id}:{index}"`. A group may instead list parallel `labels` and
//! `descriptions` arrays.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::{generated_id, validate_dataset, Dataset, DescriptiveLabel, GlossaryEntry, SemanticGroup};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupEntry {
    pub label: String,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub group_id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<GroupEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descriptions: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetFile {
    pub groups: Vec<GroupFile>,
}

impl GroupFile {
    pub fn from_group(group: &SemanticGroup) -> Self {
        let entries = group
            .labels
            .iter()
            .zip(&group.glossary)
            .enumerate()
            .map(|(p, (l, g))| {
                let generated = generated_id(&group.group_id, p);
                GroupEntry {
                    label: l.text.clone(),
                    description: g.text.clone(),
                    label_id: (l.label_id != generated).then(|| l.label_id.clone()),
                    entry_id: (g.entry_id != generated).then(|| g.entry_id.clone()),
                }
            })
            .collect();
        Self {
            group_id: group.group_id.clone(),
            entries,
            labels: None,
            descriptions: None,
        }
    }

    /// Converts to a group. Shape problems that the dataset validator would
    /// not see (empty group, both shapes at once) are reported here.
    pub fn into_group(self) -> Result<SemanticGroup> {
        let gid = self.group_id;
        let parallel = self.labels.is_some() || self.descriptions.is_some();
        if parallel && !self.entries.is_empty() {
            return Err(Error::Validation(vec![format!(
                "group {gid}: use either entries or labels/descriptions, not both"
            )]));
        }
        let mut labels = Vec::new();
        let mut glossary = Vec::new();
        if parallel {
            let ls = self.labels.unwrap_or_default();
            let ds = self.descriptions.unwrap_or_default();
            for (p, text) in ls.into_iter().enumerate() {
                labels.push(DescriptiveLabel::new(generated_id(&gid, p), text));
            }
            for (p, text) in ds.into_iter().enumerate() {
                glossary.push(GlossaryEntry::new(generated_id(&gid, p), text));
            }
        } else {
            for (p, e) in self.entries.into_iter().enumerate() {
                let id = generated_id(&gid, p);
                labels.push(DescriptiveLabel::new(e.label_id.unwrap_or_else(|| id.clone()), e.label));
                glossary.push(GlossaryEntry::new(e.entry_id.unwrap_or(id), e.description));
            }
        }
        if labels.is_empty() && glossary.is_empty() {
            return Err(Error::Validation(vec![format!("group {gid}: no entries")]));
        }
        Ok(SemanticGroup {
            group_id: gid,
            labels,
            glossary,
        })
    }
}

fn finish(groups: Vec<GroupFile>) -> Result<Dataset> {
    let mut out = Vec::with_capacity(groups.len());
    let mut shape_errors = Vec::new();
    for g in groups {
        match g.into_group() {
            Ok(group) => out.push(group),
            Err(Error::Validation(v)) => shape_errors.extend(v),
            Err(e) => return Err(e),
        }
    }
    let dataset = Dataset::new(out);
    shape_errors.extend(validate_dataset(&dataset));
    if shape_errors.is_empty() {
        Ok(dataset)
    } else {
        Err(Error::Validation(shape_errors))
    }
}

/// Parses and validates a `{"groups": [...]}` document.
pub fn parse_dataset_json(text: &str) -> Result<Dataset> {
    let file: DatasetFile = serde_json::from_str(text).map_err(|e| Error::from_json(&e))?;
    finish(file.groups)
}

pub fn parse_group_json(text: &str) -> Result<GroupFile> {
    serde_json::from_str(text).map_err(|e| Error::from_json(&e))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn with_path(path: &Path, err: Error) -> Error {
    match err {
        Error::Parse { message, line, column } => Error::Parse {
            message: format!("{}: {message}", path.display()),
            line,
            column,
        },
        other => other,
    }
}

/// Loads a dataset file or a directory of one-group files.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if !meta.is_dir() {
        return parse_dataset_json(&read(path)?).map_err(|e| with_path(path, e));
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| Error::io(path, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| Error::io(path, e)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.extension().is_some_and(|x| x == "json") && p.is_file())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{}: directory contains no .json group files",
            path.display()
        )));
    }
    let groups = files
        .iter()
        .map(|f| parse_group_json(&read(f)?).map_err(|e| with_path(f, e)))
        .collect::<Result<Vec<_>>>()?;
    finish(groups)
}

/// Serializes a dataset in the group-file format. IDs are written only when
/// they differ from the generated form, so `load(emit(d)) == d`.
pub fn emit_dataset_json(dataset: &Dataset) -> String {
    let file = DatasetFile {
        groups: dataset.groups.iter().map(GroupFile::from_group).collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("dataset serializes");
    s.push('\n');
    s
}

pub fn write_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, emit_dataset_json(dataset)).map_err(|e| Error::io(path, e))
}

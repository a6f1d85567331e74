//! Append-only record cache for knowledge lookups.
//!
//! One JSON object per line:
//!
//! ```text
//! {"kind":"search","key":{"query":"lvdd","limit":10},"payload":["Q1","Q2"],"fetched_at":1700000000}
//! {"kind":"entities","key":["Q1","Q2"],"payload":[{"id":"Q1","label":"…","description":"…"}],"fetched_at":1700000000}
//! ```
//!
//! Later records for the same key replace earlier ones. The same files serve
//! as offline fixtures.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::EntityText;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchKey {
    pub query: String,
    pub limit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CacheRecord {
    Search {
        key: SearchKey,
        payload: Vec<String>,
        fetched_at: u64,
    },
    Entities {
        /// Sorted, de-duplicated entity IDs.
        key: Vec<String>,
        payload: Vec<EntityText>,
        fetched_at: u64,
    },
}

impl CacheRecord {
    /// Parses one line and checks key/payload consistency.
    pub fn parse_line(line: &str) -> Result<Self> {
        let record: CacheRecord = serde_json::from_str(line).map_err(|e| Error::from_json(&e))?;
        record.check()?;
        Ok(record)
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("cache records serialize")
    }

    fn check(&self) -> Result<()> {
        match self {
            CacheRecord::Search { key, payload, .. } => {
                if key.query.trim().is_empty() {
                    return Err(Error::parse("search record with empty query"));
                }
                if payload.len() > key.limit {
                    return Err(Error::parse(format!(
                        "search record for {:?} has {} results, limit {}",
                        key.query,
                        payload.len(),
                        key.limit
                    )));
                }
                if payload.iter().any(|id| id.is_empty()) {
                    return Err(Error::parse("search record with empty entity id"));
                }
            }
            CacheRecord::Entities { key, payload, .. } => {
                if key.is_empty() {
                    return Err(Error::parse("entities record with empty key"));
                }
                if key.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::parse("entities record key is not sorted and unique"));
                }
                for text in payload {
                    if key.binary_search(&text.entity_id).is_err() {
                        return Err(Error::parse(format!(
                            "entities record payload has {:?}, not in its key",
                            text.entity_id
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Canonical key for an entity batch.
pub fn entities_key<'a>(ids: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut key: Vec<String> = ids.into_iter().map(str::to_string).collect();
    key.sort();
    key.dedup();
    key
}

#[derive(Default)]
struct Tables {
    search: HashMap<SearchKey, Vec<String>>,
    entities: HashMap<Vec<String>, Vec<EntityText>>,
}

/// In-memory view of a cache file, optionally appending new records to it.
/// Readers proceed concurrently; writers are serialized.
pub struct RecordCache {
    tables: RwLock<Tables>,
    writer: Option<Mutex<File>>,
    path: Option<PathBuf>,
}

impl RecordCache {
    pub fn in_memory() -> Self {
        Self {
            tables: RwLock::new(Tables::default()),
            writer: None,
            path: None,
        }
    }

    /// Parses cache records from text, one per line. Blank lines are skipped.
    pub fn parse_str(text: &str) -> Result<Self> {
        let cache = Self::in_memory();
        for (i, line) in text.lines().enumerate() {
            cache.load_line(line, i + 1)?;
        }
        Ok(cache)
    }

    /// Reads `path` (if it exists) without attaching a writer.
    pub fn load(path: &Path) -> Result<Self> {
        let cache = Self::in_memory();
        if path.exists() {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| Error::io(path, e))?;
                cache.load_line(&line, i + 1)?;
            }
        }
        Ok(cache)
    }

    /// Reads `path` and appends every subsequently inserted record to it.
    pub fn open(path: &Path) -> Result<Self> {
        let mut cache = Self::load(path)?;
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        cache.writer = Some(Mutex::new(file));
        cache.path = Some(path.to_path_buf());
        Ok(cache)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    fn load_line(&self, line: &str, line_no: usize) -> Result<()> {
        if line.trim().is_empty() {
            return Ok(());
        }
        let record = CacheRecord::parse_line(line).map_err(|e| match e {
            Error::Parse { message, column, .. } => Error::Parse {
                message,
                line: Some(line_no),
                column,
            },
            other => other,
        })?;
        self.apply(record);
        Ok(())
    }

    fn apply(&self, record: CacheRecord) {
        let mut tables = self.tables.write().unwrap();
        match record {
            CacheRecord::Search { key, payload, .. } => {
                tables.search.insert(key, payload);
            }
            CacheRecord::Entities { key, payload, .. } => {
                tables.entities.insert(key, payload);
            }
        }
    }

    pub fn lookup_search(&self, query: &str, limit: usize) -> Option<Vec<String>> {
        let key = SearchKey {
            query: query.to_string(),
            limit,
        };
        self.tables.read().unwrap().search.get(&key).cloned()
    }

    /// `key` must be canonical (see [`entities_key`]).
    pub fn lookup_entities(&self, key: &[String]) -> Option<Vec<EntityText>> {
        self.tables.read().unwrap().entities.get(key).cloned()
    }

    /// Records a lookup result, appending it to the backing file if any.
    pub fn insert(&self, record: CacheRecord) -> Result<()> {
        record.check()?;
        if let Some(writer) = &self.writer {
            let mut file = writer.lock().unwrap();
            let line = record.to_line();
            writeln!(file, "{line}")
                .and_then(|_| file.flush())
                .map_err(|e| Error::io(self.path.clone().unwrap_or_default(), e))?;
            // Update the tables while still holding the writer lock so file
            // order and table state agree.
            self.apply(record);
        } else {
            self.apply(record);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        let t = self.tables.read().unwrap();
        t.search.len() + t.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Order-independent digest of the current cache contents.
    pub fn content_hash(&self) -> String {
        let t = self.tables.read().unwrap();
        let search: BTreeMap<_, _> = t.search.iter().collect();
        let entities: BTreeMap<_, _> = t.entities.iter().collect();
        let mut hasher = Sha256::new();
        for (k, v) in search {
            hasher.update(serde_json::to_vec(&(k, v)).expect("serializes"));
            hasher.update(b"\n");
        }
        for (k, v) in entities {
            hasher.update(serde_json::to_vec(&(k, v)).expect("serializes"));
            hasher.update(b"\n");
        }
        hex::encode(hasher.finalize())
    }
}

//! N-choice benchmark: instance generation, ranking metrics, the
//! configuration matrix runner and report files.

pub mod metrics;
pub mod problems;
pub mod report;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Dataset, MatchConfig, SemanticGroup};
use crate::error::{Error, Result};
use crate::scoring::{CandidateRef, LabelSide, Matcher, RankedCandidates};

pub use metrics::{compute_hits, compute_mrr, hits_columns};
pub use problems::{generate_choice_problems, CandidateEntry, ChoiceInstance};
pub use report::{dataset_hash, emit_report, render_csv, render_table, write_manifest, RunManifest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub label_id: String,
    pub label: String,
    pub group_id: String,
    pub rank: usize,
    /// Total score of the true candidate.
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config_name: String,
    pub n_choices: usize,
    pub mrr: f64,
    pub hits: BTreeMap<usize, f64>,
    pub instance_count: usize,
    pub records: Vec<InstanceRecord>,
}

impl BenchmarkReport {
    pub fn from_records(config_name: String, n_choices: usize, records: Vec<InstanceRecord>) -> Result<Self> {
        let ranks: Vec<usize> = records.iter().map(|r| r.rank).collect();
        let mrr = compute_mrr(&ranks)?;
        let hits = hits_columns(n_choices)
            .into_iter()
            .map(|k| Ok((k, compute_hits(&ranks, k)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            config_name,
            n_choices,
            mrr,
            hits,
            instance_count: records.len(),
            records,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigFailure {
    pub config_name: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixOutcome {
    pub reports: Vec<BenchmarkReport>,
    pub failures: Vec<ConfigFailure>,
    pub instance_count: usize,
}

/// Resolves instance group references against a dataset.
struct GroupIndex<'a> {
    by_id: HashMap<&'a str, &'a SemanticGroup>,
}

impl<'a> GroupIndex<'a> {
    fn new(dataset: &'a Dataset) -> Self {
        Self {
            by_id: dataset.groups.iter().map(|g| (g.group_id.as_str(), g)).collect(),
        }
    }

    fn get(&self, id: &str) -> Result<&'a SemanticGroup> {
        self.by_id
            .get(id)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("instance refers to unknown group {id:?}")))
    }
}

/// Ranks the candidates of one instance.
pub fn rank_instance(
    dataset: &Dataset,
    instance: &ChoiceInstance,
    config: &MatchConfig,
    matcher: &Matcher,
) -> Result<RankedCandidates> {
    rank_with_index(&GroupIndex::new(dataset), instance, config, matcher)
}

fn rank_with_index(
    index: &GroupIndex<'_>,
    instance: &ChoiceInstance,
    config: &MatchConfig,
    matcher: &Matcher,
) -> Result<RankedCandidates> {
    let side = LabelSide {
        label: &instance.target_label,
        group: index.get(&instance.target_group_id)?,
    };
    let candidates = instance
        .candidates
        .iter()
        .map(|c| {
            Ok(CandidateRef {
                description: &c.entry,
                glossary: index.get(&c.group_id)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    matcher.rank_candidates(side, &candidates, instance.truth_index, config)
}

fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
}

/// Ranks every instance under one configuration.
pub fn run_config(
    dataset: &Dataset,
    instances: &[ChoiceInstance],
    n_choices: usize,
    config: &MatchConfig,
    matcher: &Matcher,
    workers: Option<usize>,
) -> Result<BenchmarkReport> {
    matcher.supports(config)?;
    let index = GroupIndex::new(dataset);
    let pool = thread_pool(workers)?;
    let records = pool.install(|| {
        instances
            .par_iter()
            .map(|inst| {
                let ranked = rank_with_index(&index, inst, config, matcher)?;
                let total = ranked
                    .ranking
                    .iter()
                    .find(|(i, _)| *i == inst.truth_index)
                    .map(|(_, b)| b.total)
                    .unwrap_or(0.0);
                Ok(InstanceRecord {
                    label_id: inst.target_label.label_id.clone(),
                    label: inst.target_label.text.clone(),
                    group_id: inst.target_group_id.clone(),
                    rank: ranked.rank_of_truth,
                    total,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    BenchmarkReport::from_records(config.name(), n_choices, records)
}

/// Generates the instances once and evaluates each configuration on them.
/// A failing configuration is recorded and the rest still run.
pub fn run_matrix(
    dataset: &Dataset,
    n_choices: usize,
    seed: u64,
    configs: &[MatchConfig],
    matcher: &Matcher,
    workers: Option<usize>,
) -> Result<MatrixOutcome> {
    if configs.is_empty() {
        return Err(Error::InvalidArgument("no configurations to run".into()));
    }
    let instances = generate_choice_problems(dataset, n_choices, seed)?;
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for config in configs {
        match run_config(dataset, &instances, n_choices, config, matcher, workers) {
            Ok(report) => reports.push(report),
            Err(e) => {
                tracing::warn!(config = %config, error = %e, "configuration failed");
                failures.push(ConfigFailure {
                    config_name: config.name(),
                    error: e.to_string(),
                });
            }
        }
    }
    Ok(MatrixOutcome {
        reports,
        failures,
        instance_count: instances.len(),
    })
}

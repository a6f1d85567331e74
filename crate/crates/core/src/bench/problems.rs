//! N-choice problem generation.
//!
//! Every `(group, index)` pair of a dataset becomes one instance: the true
//! description plus `N - 1` distractors drawn uniformly without replacement
//! from the entries of the other groups. Distractors keep their home
//! glossary. Each instance has its own ChaCha stream seeded from
//! `(seed, group_id, index)`, so instances are reproducible independently.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::{Dataset, DescriptiveLabel, GlossaryEntry};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateEntry {
    pub entry: GlossaryEntry,
    pub group_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceInstance {
    pub target_label: DescriptiveLabel,
    pub target_group_id: String,
    pub candidates: Vec<CandidateEntry>,
    pub truth_index: usize,
}

impl ChoiceInstance {
    pub fn truth(&self) -> &CandidateEntry {
        &self.candidates[self.truth_index]
    }
}

fn instance_rng(seed: u64, group_id: &str, index: usize) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(b"dld-choice-v1");
    h.update(seed.to_le_bytes());
    h.update((group_id.len() as u64).to_le_bytes());
    h.update(group_id.as_bytes());
    h.update((index as u64).to_le_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

pub fn generate_choice_problems(dataset: &Dataset, n_choices: usize, seed: u64) -> Result<Vec<ChoiceInstance>> {
    if n_choices < 2 {
        return Err(Error::InvalidArgument(format!(
            "N-choice problems need N >= 2, got {n_choices}"
        )));
    }
    let total = dataset.entry_count();
    if total < n_choices {
        return Err(Error::InvalidArgument(format!(
            "dataset too small for {n_choices}-choice problems: {n_choices} entries required, {total} available"
        )));
    }
    for group in &dataset.groups {
        let others = total - group.labels.len();
        if !group.labels.is_empty() && others < n_choices - 1 {
            return Err(Error::InvalidArgument(format!(
                "group {}: {} distractor entries from other groups required, {others} available",
                group.group_id,
                n_choices - 1
            )));
        }
    }

    // Flattened (group, position) view; each group occupies a contiguous block.
    let mut starts = Vec::with_capacity(dataset.groups.len());
    let mut flat = Vec::with_capacity(total);
    for (gi, group) in dataset.groups.iter().enumerate() {
        starts.push(flat.len());
        flat.extend((0..group.labels.len()).map(|p| (gi, p)));
    }

    let mut out = Vec::with_capacity(total);
    for (gi, group) in dataset.groups.iter().enumerate() {
        let start = starts[gi];
        let len = group.labels.len();
        let pool = total - len;
        for p in 0..len {
            let (label, entry) = group.true_pair(p)?;
            let mut rng = instance_rng(seed, &group.group_id, p);
            let mut candidates: Vec<CandidateEntry> = index::sample(&mut rng, pool, n_choices - 1)
                .into_iter()
                .map(|k| {
                    let (dg, dp) = flat[if k < start { k } else { k + len }];
                    let g = &dataset.groups[dg];
                    CandidateEntry {
                        entry: g.glossary[dp].clone(),
                        group_id: g.group_id.clone(),
                    }
                })
                .collect();
            let truth_index = rng.random_range(0..n_choices);
            candidates.insert(
                truth_index,
                CandidateEntry {
                    entry: entry.clone(),
                    group_id: group.group_id.clone(),
                },
            );
            out.push(ChoiceInstance {
                target_label: label.clone(),
                target_group_id: group.group_id.clone(),
                candidates,
                truth_index,
            });
        }
    }
    Ok(out)
}

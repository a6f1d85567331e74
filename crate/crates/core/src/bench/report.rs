use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{BenchmarkReport, ConfigFailure};
use crate::domain::Dataset;
use crate::error::{Error, Result};

/// Everything needed to reproduce a benchmark run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub seed: u64,
    pub n_choices: usize,
    pub configs: Vec<String>,
    pub dataset_hash: String,
    pub cache_hash: Option<String>,
    pub instance_count: usize,
    pub failures: Vec<ConfigFailure>,
}

/// SHA-256 of the canonical JSON form of a dataset.
pub fn dataset_hash(dataset: &Dataset) -> String {
    let bytes = serde_json::to_vec(dataset).expect("dataset serializes");
    hex::encode(Sha256::digest(&bytes))
}

fn hits_keys(reports: &[BenchmarkReport]) -> Vec<usize> {
    let mut ks: Vec<usize> = reports.iter().flat_map(|r| r.hits.keys().copied()).collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

pub fn render_csv(reports: &[BenchmarkReport]) -> String {
    let ks = hits_keys(reports);
    let mut out = String::from("config,mrr");
    for k in &ks {
        let _ = write!(out, ",hits@{k}");
    }
    out.push('\n');
    for r in reports {
        let _ = write!(out, "{},{:.6}", r.config_name, r.mrr);
        for k in &ks {
            match r.hits.get(k) {
                Some(v) => {
                    let _ = write!(out, ",{v:.6}");
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

pub fn render_table(reports: &[BenchmarkReport]) -> String {
    let ks = hits_keys(reports);
    let mut header = vec!["config".to_string(), "MRR".to_string()];
    header.extend(ks.iter().map(|k| format!("Hits@{k}")));
    let mut rows = vec![header];
    for r in reports {
        let mut row = vec![r.config_name.clone(), format!("{:.3}", r.mrr)];
        row.extend(
            ks.iter()
                .map(|k| r.hits.get(k).map(|v| format!("{v:.3}")).unwrap_or_default()),
        );
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|row| row[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                if c == 0 {
                    format!("{cell:<w$}", w = widths[c])
                } else {
                    format!("{cell:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes `report.csv` and `report.txt` into `out_dir`.
pub fn emit_report(reports: &[BenchmarkReport], out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    Ok(vec![
        write_file(out_dir.join("report.csv"), &render_csv(reports))?,
        write_file(out_dir.join("report.txt"), &render_table(reports))?,
    ])
}

pub fn write_manifest(manifest: &RunManifest, out_dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    json.push('\n');
    write_file(out_dir.join("manifest.json"), &json)
}

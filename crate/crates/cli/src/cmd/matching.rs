use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use dld_core::ingest::load_dataset;
use dld_core::scoring::{CandidateRef, LabelSide, Undetermined};
use dld_core::testkit::{certain, ScriptedLlm};
use dld_core::{DescriptiveLabel, Error, GlossaryEntry, MatchConfig, Result, SemanticGroup};

use crate::backends;
use crate::BackendArgs;

#[derive(Args, Debug)]
pub struct MatchArgs {
    /// Text file with one label per line.
    #[arg(long)]
    labels: PathBuf,
    /// Glossaries: dataset/group JSON files, or text files with one
    /// description per line.
    #[arg(long, required = true, num_args = 1..)]
    glossary: Vec<PathBuf>,
    /// Configuration name, e.g. T or L-LSE-SCC.
    #[arg(long = "using", default_value = "T")]
    using: MatchConfig,
    /// Candidates to report per label (clamped to the number available).
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Serialize)]
struct Candidate<'a> {
    rank: usize,
    entry_id: &'a str,
    group_id: &'a str,
    description: &'a str,
    text_score: f64,
    context_score: f64,
    total: f64,
    best_sentence: String,
    undetermined: BTreeSet<Undetermined>,
}

#[derive(Serialize)]
struct LabelMatches<'a> {
    label: &'a str,
    candidates: Vec<Candidate<'a>>,
}

#[derive(Serialize)]
struct Output<'a> {
    config: String,
    k: usize,
    matches: Vec<LabelMatches<'a>>,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty())
}

fn load_glossary(path: &Path) -> Result<Vec<SemanticGroup>> {
    if path.is_dir() || path.extension().is_some_and(|x| x == "json") {
        return Ok(load_dataset(path)?.groups);
    }
    let group_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "glossary".into());
    let glossary = lines(&read_text(path)?)
        .enumerate()
        .map(|(i, d)| GlossaryEntry::new(format!("{group_id}:{i}"), d))
        .collect();
    Ok(vec![SemanticGroup {
        group_id,
        labels: Vec::new(),
        glossary,
    }])
}

pub fn run(args: MatchArgs) -> Result<u8> {
    let label_text = read_text(&args.labels)?;
    let labels: Vec<DescriptiveLabel> = lines(&label_text)
        .enumerate()
        .map(|(i, l)| DescriptiveLabel::new(format!("labels:{i}"), l))
        .collect();
    if labels.is_empty() {
        return Err(Error::InvalidArgument(format!("{}: no labels", args.labels.display())));
    }
    let label_group = SemanticGroup {
        group_id: "labels".into(),
        labels,
        glossary: Vec::new(),
    };

    let mut glossaries = Vec::new();
    for path in &args.glossary {
        glossaries.extend(load_glossary(path)?);
    }
    let candidates: Vec<CandidateRef> = glossaries
        .iter()
        .flat_map(|g| {
            g.glossary.iter().map(move |d| CandidateRef {
                description: d,
                glossary: g,
            })
        })
        .collect();
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("the glossaries contain no descriptions".into()));
    }

    let settings = backends::settings(&args.backend)?;
    let knowledge = backends::knowledge(&args.backend, &settings)?;
    let matcher = backends::matcher(&args.backend, &settings, knowledge, || ScriptedLlm::new(certain("No")))?;
    matcher.supports(&args.using)?;

    let k = (args.k as usize).min(candidates.len());
    let mut matches = Vec::new();
    for label in &label_group.labels {
        let side = LabelSide {
            label,
            group: &label_group,
        };
        let ranked = matcher.score_candidates(side, &candidates, &args.using)?;
        let top = ranked
            .into_iter()
            .take(k)
            .enumerate()
            .map(|(pos, (i, b))| Candidate {
                rank: pos + 1,
                entry_id: &candidates[i].description.entry_id,
                group_id: &candidates[i].glossary.group_id,
                description: &candidates[i].description.text,
                text_score: b.text_score,
                context_score: b.context_score,
                total: b.total,
                best_sentence: b.best_sentence,
                undetermined: b.undetermined,
            })
            .collect();
        matches.push(LabelMatches {
            label: &label.text,
            candidates: top,
        });
    }

    let output = Output {
        config: args.using.name(),
        k,
        matches,
    };
    let mut json = serde_json::to_string_pretty(&output).expect("match output serializes");
    json.push('\n');
    match &args.out {
        Some(path) => {
            std::fs::write(path, json).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?
        }
        None => print!("{json}"),
    }
    Ok(0)
}

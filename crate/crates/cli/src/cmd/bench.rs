use std::path::PathBuf;

use clap::Args;

use dld_core::bench::{dataset_hash, emit_report, render_table, run_matrix, write_manifest, RunManifest};
use dld_core::ingest::load_dataset;
use dld_core::testkit::perfect_oracle_script;
use dld_core::{Error, MatchConfig, Result};

use crate::backends;
use crate::BackendArgs;

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// "all", or comma-separated names such as T,T-LSE,L-SCC.
    #[arg(long, default_value = "all", value_parser = parse_configs)]
    configs: ConfigList,
    /// Candidates per problem.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the number of processors.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Debug, Clone)]
pub struct ConfigList(Vec<MatchConfig>);

fn parse_configs(s: &str) -> std::result::Result<ConfigList, String> {
    if s.trim() == "all" {
        return Ok(ConfigList(MatchConfig::all()));
    }
    let mut out: Vec<MatchConfig> = Vec::new();
    for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        let cfg: MatchConfig = name.parse().map_err(|e: Error| e.to_string())?;
        if !out.contains(&cfg) {
            out.push(cfg);
        }
    }
    if out.is_empty() {
        return Err("no configuration names given".into());
    }
    Ok(ConfigList(out))
}

pub fn run(args: BenchArgs) -> Result<u8> {
    let dataset = load_dataset(&args.dataset)?;
    let settings = backends::settings(&args.backend)?;
    let knowledge = backends::knowledge(&args.backend, &settings)?;
    let matcher = backends::matcher(&args.backend, &settings, knowledge.clone(), || {
        perfect_oracle_script(&dataset, &settings.prompt)
    })?;

    let n = args.n as usize;
    let configs = args.configs.0;
    let outcome = run_matrix(
        &dataset,
        n,
        args.seed,
        &configs,
        &matcher,
        args.workers.map(|w| w as usize),
    )?;

    emit_report(&outcome.reports, &args.out)?;
    let manifest = RunManifest {
        seed: args.seed,
        n_choices: n,
        configs: configs.iter().map(MatchConfig::name).collect(),
        dataset_hash: dataset_hash(&dataset),
        cache_hash: Some(knowledge.cache().content_hash()),
        instance_count: outcome.instance_count,
        failures: outcome.failures.clone(),
    };
    write_manifest(&manifest, &args.out)?;

    if !outcome.reports.is_empty() {
        print!("{}", render_table(&outcome.reports));
    }
    for f in &outcome.failures {
        eprintln!("{} failed: {}", f.config_name, f.error);
    }
    Ok(if outcome.reports.is_empty() { 4 } else { 0 })
}

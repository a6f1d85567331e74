use std::path::PathBuf;

use clap::Args;

use dld_core::ingest::load_dataset;
use dld_core::lse::{enrich_with, EnrichOptions, DEFAULT_MAX_RESULTS};
use dld_core::{Error, Result};

use crate::backends;
use crate::BackendArgs;

#[derive(Args, Debug)]
pub struct EnrichArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Knowledge cache file to read and, with --live, extend.
    #[arg(long)]
    cache: PathBuf,
    #[arg(long)]
    live: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_RESULTS)]
    max_results: usize,
}

pub fn run(args: EnrichArgs) -> Result<u8> {
    let dataset = load_dataset(&args.dataset)?;
    let backend = BackendArgs {
        config: args.config.clone(),
        cache: Some(args.cache.clone()),
        live: args.live,
        mock: false,
        script: None,
    };
    let settings = backends::settings(&backend)?;
    let client = backends::knowledge(&backend, &settings)?;
    let options = EnrichOptions {
        lse_enabled: true,
        include_raw_label: true,
        max_results: args.max_results,
    };

    let (mut hits, mut fetched) = (0usize, 0usize);
    let mut missing = Vec::new();
    let labels: Vec<_> = dataset.groups.iter().flat_map(|g| &g.labels).collect();
    for label in &labels {
        match enrich_with(label, &options, client.as_ref()) {
            Ok(r) if r.cache_hit => hits += 1,
            Ok(_) => fetched += 1,
            Err(e) if e.is_retrieval() => missing.push(e),
            Err(e) => return Err(e),
        }
    }

    println!(
        "labels: {}  hits: {hits}  fetched: {fetched}  missing: {}",
        labels.len(),
        missing.len()
    );
    if missing.is_empty() {
        return Ok(0);
    }
    for e in &missing {
        match e {
            Error::Enrichment { label, source } => eprintln!("missing {label:?}: {source}"),
            other => eprintln!("missing: {other}"),
        }
    }
    Ok(3)
}

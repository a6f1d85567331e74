//! `dld`: ingest datasets, warm the knowledge cache, run the N-choice
//! benchmark and match labels ad hoc.

mod backends;
mod cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dld_core::Error;

#[derive(Parser)]
#[command(name = "dld", version, about = "Match descriptive labels to glossary descriptions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert an ontology, a CSV table or a dataset file into the group-file format.
    Ingest(cmd::ingest::IngestArgs),
    /// Fetch enrichment sentences for every label into the cache.
    Enrich(cmd::enrich::EnrichArgs),
    /// Run the N-choice benchmark over a set of configurations.
    Bench(cmd::bench::BenchArgs),
    /// Rank glossary descriptions for each label of a label list.
    Match(cmd::matching::MatchArgs),
}

/// Backend options shared by `bench` and `match`.
#[derive(Args, Debug, Clone)]
pub struct BackendArgs {
    /// TOML settings file; endpoints may also come from DLD_* variables.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Knowledge cache file (JSON lines).
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Allow fetching cache misses from Wikidata.
    #[arg(long)]
    pub live: bool,
    /// Use in-process model and embedding stand-ins instead of endpoints.
    #[arg(long)]
    pub mock: bool,
    /// Scripted model answers for --mock (JSON).
    #[arg(long, requires = "mock")]
    pub script: Option<PathBuf>,
}

/// Process exit status for a failed command.
fn exit_code(err: &Error) -> u8 {
    if err.is_retrieval() {
        return 3;
    }
    match err {
        Error::InvalidArgument(_)
        | Error::Validation(_)
        | Error::Parse { .. }
        | Error::Schema(_)
        | Error::IndexOutOfRange { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(a) => cmd::ingest::run(a),
        Command::Enrich(a) => cmd::enrich::run(a),
        Command::Bench(a) => cmd::bench::run(a),
        Command::Match(a) => cmd::matching::run(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

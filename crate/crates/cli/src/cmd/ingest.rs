use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args};

use dld_core::domain::validate_dataset;
use dld_core::ingest::{extract_ontology, load_dataset, load_table_csv, write_dataset};
use dld_core::{Dataset, Error, Result};

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["fibo", "csv", "dataset"])))]
pub struct IngestArgs {
    /// RDF/XML ontology files, or directories holding them.
    #[arg(long, num_args = 1..)]
    fibo: Vec<PathBuf>,
    /// A table with one label column and one description column.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// An existing dataset file or directory of group files (re-validated).
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long, default_value = "label")]
    label_col: String,
    #[arg(long, default_value = "description")]
    desc_col: String,
    /// Group id for --csv; defaults to the file stem.
    #[arg(long)]
    group_id: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

fn ontology_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries =
                std::fs::read_dir(input).map_err(|e| Error::InvalidArgument(format!("{}: {e}", input.display())))?;
            for entry in entries.flatten() {
                let path = entry.path();
                if path.extension().is_some_and(|x| x == "rdf" || x == "owl") {
                    files.push(path);
                }
            }
        } else {
            files.push(input.clone());
        }
    }
    if files.is_empty() {
        return Err(Error::InvalidArgument("no ontology files found".into()));
    }
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "table".into())
}

pub fn run(args: IngestArgs) -> Result<u8> {
    let dataset = if !args.fibo.is_empty() {
        extract_ontology(&ontology_files(&args.fibo)?)?
    } else if let Some(csv) = &args.csv {
        let group_id = args.group_id.clone().unwrap_or_else(|| stem(csv));
        Dataset::new(vec![load_table_csv(csv, &group_id, &args.label_col, &args.desc_col)?])
    } else {
        load_dataset(args.dataset.as_deref().expect("clap enforces one source"))?
    };
    let violations = validate_dataset(&dataset);
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    write_dataset(&dataset, &args.out)?;
    println!(
        "{} entries in {} groups -> {}",
        dataset.entry_count(),
        dataset.groups.len(),
        args.out.display()
    );
    Ok(0)
}

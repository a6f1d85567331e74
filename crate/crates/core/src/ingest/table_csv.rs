//! One group from a table-style CSV with a header row.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::domain::{generated_id, DescriptiveLabel, GlossaryEntry, SemanticGroup};
use crate::error::{Error, Result};

pub fn parse_table_csv<R: Read>(
    reader: R,
    group_id: &str,
    label_column: &str,
    description_column: &str,
) -> Result<SemanticGroup> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::InvalidArgument("CSV input is empty".into()));
    }
    let col = |name: &str| {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| {
            Error::Schema(format!(
                "column {name:?} not found in header [{}]",
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })
    };
    let li = col(label_column)?;
    let di = col(description_column)?;

    let mut labels = Vec::new();
    let mut glossary = Vec::new();
    let mut problems = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let label = record.get(li).unwrap_or("").trim();
        let description = record.get(di).unwrap_or("").trim();
        if label.is_empty() {
            problems.push(format!("row at line {line}: empty label"));
        }
        if description.is_empty() {
            problems.push(format!("row at line {line}: empty description"));
        }
        let id = generated_id(group_id, labels.len());
        labels.push(DescriptiveLabel::new(id.clone(), label));
        glossary.push(GlossaryEntry::new(id, description));
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    if labels.is_empty() {
        return Err(Error::InvalidArgument("CSV input has a header but no rows".into()));
    }
    Ok(SemanticGroup {
        group_id: group_id.to_string(),
        labels,
        glossary,
    })
}

pub fn load_table_csv(
    path: &Path,
    group_id: &str,
    label_column: &str,
    description_column: &str,
) -> Result<SemanticGroup> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    if file.metadata().map_err(|e| Error::io(path, e))?.len() == 0 {
        return Err(Error::InvalidArgument(format!("{}: empty CSV file", path.display())));
    }
    parse_table_csv(file, group_id, label_column, description_column)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize);
    Error::Parse {
        message: e.to_string(),
        line,
        column: None,
    }
}

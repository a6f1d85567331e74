//! Dataset loaders: JSON group files, table CSV, and RDF/XML ontologies.

pub mod group_file;
pub mod ontology;
pub mod table_csv;

pub use group_file::{emit_dataset_json, load_dataset, parse_dataset_json, write_dataset, GroupEntry, GroupFile};
pub use ontology::{extract_ontology, extract_ontology_sources, iri_namespace};
pub use table_csv::{load_table_csv, parse_table_csv};

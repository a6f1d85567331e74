pub mod bench;
pub mod enrich;
pub mod ingest;
pub mod matching;

//! Label/definition extraction from RDF/XML ontologies.
//!
//! Only the annotation subset is read: every node element with an IRI
//! contributes its `rdfs:label` (or `skos:prefLabel`) and any property whose
//! local name is `definition` or `description`, ignoring case. Entities with
//! a label and a definition become entries, grouped by IRI namespace.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use roxmltree::{Document, Node, ParsingOptions};

use crate::domain::{validate_dataset, Dataset, DescriptiveLabel, GlossaryEntry, SemanticGroup};
use crate::error::{Error, Result};

const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";
const OWL: &str = "http://www.w3.org/2002/07/owl#";
const XML: &str = "http://www.w3.org/XML/1998/namespace";

/// Language preference: English, then untagged. Other languages are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum LangRank {
    English,
    Untagged,
}

fn lang_rank(node: Node<'_, '_>) -> Option<LangRank> {
    let lang = node.ancestors().find_map(|n| n.attribute((XML, "lang"))).unwrap_or("");
    if lang.is_empty() {
        Some(LangRank::Untagged)
    } else if lang.eq_ignore_ascii_case("en") || lang.to_ascii_lowercase().starts_with("en-") {
        Some(LangRank::English)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum TextKind {
    Definition,
    Description,
}

/// Best value seen so far for one slot, by (kind, language) rank.
#[derive(Debug, Clone)]
struct Slot<R: Ord + Copy> {
    best: Option<(R, String)>,
}

impl<R: Ord + Copy> Default for Slot<R> {
    fn default() -> Self {
        Self { best: None }
    }
}

impl<R: Ord + Copy> Slot<R> {
    fn offer(&mut self, rank: R, value: String) {
        if self.best.as_ref().is_none_or(|(r, _)| rank < *r) {
            self.best = Some((rank, value));
        }
    }

    fn merge(&mut self, other: Slot<R>) {
        if let Some((r, v)) = other.best {
            self.offer(r, v);
        }
    }
}

#[derive(Debug, Default, Clone)]
struct Annotations {
    label: Slot<(u8, LangRank)>,
    text: Slot<(TextKind, LangRank)>,
    is_ontology_header: bool,
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn literal_text(node: Node<'_, '_>) -> Option<String> {
    if node.attribute((RDF, "resource")).is_some() {
        return None;
    }
    let raw: String = node
        .descendants()
        .filter(|n| n.is_text())
        .filter_map(|n| n.text())
        .collect();
    let text = collapse_ws(&raw);
    (!text.is_empty()).then_some(text)
}

fn resolve(base: Option<&url::Url>, reference: &str) -> String {
    match base {
        Some(b) if url::Url::parse(reference).is_err() => b
            .join(reference)
            .map(|u| u.to_string())
            .unwrap_or_else(|_| reference.to_string()),
        _ => reference.to_string(),
    }
}

fn node_iri(node: Node<'_, '_>, base: Option<&url::Url>) -> Option<String> {
    if let Some(about) = node.attribute((RDF, "about")) {
        return Some(resolve(base, about));
    }
    // rdf:ID only marks a node at the top level; on property elements it reifies.
    let top_level = node
        .parent_element()
        .is_some_and(|p| p.tag_name().namespace() == Some(RDF) && p.tag_name().name() == "RDF");
    match node.attribute((RDF, "ID")) {
        Some(id) if top_level => Some(resolve(base, &format!("#{id}"))),
        _ => None,
    }
}

fn is_node_element(node: Node<'_, '_>) -> bool {
    if !node.is_element() {
        return false;
    }
    let Some(parent) = node.parent_element() else {
        return false;
    };
    let tn = parent.tag_name();
    if tn.namespace() == Some(RDF) && tn.name() == "RDF" {
        return true;
    }
    // A node nested inside a property element.
    parent.parent_element().is_some_and(|gp| is_node_element(gp))
        && parent.attribute((RDF, "parseType")) != Some("Literal")
}

fn scan_document(doc: &Document<'_>, out: &mut BTreeMap<String, Annotations>) {
    let root = doc.root_element();
    let base = root.attribute((XML, "base")).and_then(|b| url::Url::parse(b).ok());
    for node in root.descendants().filter(|n| is_node_element(*n)) {
        let Some(iri) = node_iri(node, base.as_ref()) else {
            continue;
        };
        let ann = out.entry(iri).or_default();
        let tag = node.tag_name();
        if tag.namespace() == Some(OWL) && tag.name() == "Ontology" {
            ann.is_ontology_header = true;
        }
        for prop in node.children().filter(|c| c.is_element()) {
            let pt = prop.tag_name();
            let ns = pt.namespace().unwrap_or("");
            let name = pt.name();
            if ns == RDF && name == "type" {
                if prop.attribute((RDF, "resource")) == Some("http://www.w3.org/2002/07/owl#Ontology") {
                    ann.is_ontology_header = true;
                }
                continue;
            }
            let Some(lang) = lang_rank(prop) else { continue };
            let label_rank = match (ns, name) {
                (RDFS, "label") => Some(0u8),
                (SKOS, "prefLabel") => Some(1u8),
                _ => None,
            };
            if let Some(r) = label_rank {
                if let Some(text) = literal_text(prop) {
                    ann.label.offer((r, lang), text);
                }
                continue;
            }
            let kind = if name.eq_ignore_ascii_case("definition") {
                TextKind::Definition
            } else if name.eq_ignore_ascii_case("description") {
                TextKind::Description
            } else {
                continue;
            };
            if let Some(text) = literal_text(prop) {
                ann.text.offer((kind, lang), text);
            }
        }
    }
}

/// Namespace of an IRI: everything up to and including the last `#` or `/`.
pub fn iri_namespace(iri: &str) -> &str {
    match iri.rfind(['#', '/']) {
        Some(i) => &iri[..=i],
        None => iri,
    }
}

fn parse_source(name: &str, text: &str) -> Result<BTreeMap<String, Annotations>> {
    let opts = ParsingOptions {
        allow_dtd: true,
        ..ParsingOptions::default()
    };
    let doc = Document::parse_with_options(text, opts).map_err(|e| {
        let pos = e.pos();
        Error::Parse {
            message: format!("{name}: {e}"),
            line: Some(pos.row as usize),
            column: Some(pos.col as usize),
        }
    })?;
    let mut out = BTreeMap::new();
    scan_document(&doc, &mut out);
    Ok(out)
}

/// Extracts a dataset from in-memory `(name, RDF/XML text)` sources. Sources
/// are merged in the given order; the first value of each slot at the best
/// rank wins.
pub fn extract_ontology_sources(sources: &[(String, String)]) -> Result<Dataset> {
    let parsed = sources
        .par_iter()
        .map(|(name, text)| parse_source(name, text))
        .collect::<Result<Vec<_>>>()?;
    let mut merged: BTreeMap<String, Annotations> = BTreeMap::new();
    for map in parsed {
        for (iri, ann) in map {
            let slot = merged.entry(iri).or_default();
            slot.label.merge(ann.label);
            slot.text.merge(ann.text);
            slot.is_ontology_header |= ann.is_ontology_header;
        }
    }

    let mut groups: BTreeMap<String, SemanticGroup> = BTreeMap::new();
    for (iri, ann) in merged {
        if ann.is_ontology_header {
            continue;
        }
        let (Some((_, label)), Some((_, text))) = (ann.label.best, ann.text.best) else {
            continue;
        };
        let ns = iri_namespace(&iri).to_string();
        let group = groups.entry(ns.clone()).or_insert_with(|| SemanticGroup {
            group_id: ns,
            labels: Vec::new(),
            glossary: Vec::new(),
        });
        group.labels.push(DescriptiveLabel::new(iri.clone(), label));
        group.glossary.push(GlossaryEntry::new(iri, text));
    }
    if groups.is_empty() {
        return Err(Error::InvalidArgument(
            "ontology input yields no entity with both a label and a definition".into(),
        ));
    }
    let dataset = Dataset::new(groups.into_values().collect());
    let violations = validate_dataset(&dataset);
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    Ok(dataset)
}

/// Reads RDF/XML files (sorted by path) and extracts a dataset.
pub fn extract_ontology(paths: &[PathBuf]) -> Result<Dataset> {
    if paths.is_empty() {
        return Err(Error::InvalidArgument("no ontology files given".into()));
    }
    let mut paths: Vec<&Path> = paths.iter().map(PathBuf::as_path).collect();
    paths.sort();
    let sources = paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| Error::io(*p, e))?;
            Ok((p.display().to_string(), text))
        })
        .collect::<Result<Vec<_>>>()?;
    extract_ontology_sources(&sources)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(text: &str) -> Result<Dataset> {
        extract_ontology_sources(&[("t.rdf".into(), text.into())])
    }

    const HEAD: &str = r#"<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
        xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#"
        xmlns:owl="http://www.w3.org/2002/07/owl#"
        xmlns:skos="http://www.w3.org/2004/02/skos/core#"
        xmlns:dct="http://purl.org/dc/terms/">"#;

    #[test]
    fn definition_preferred_and_english_chosen() {
        let ds = one(&format!(
            r#"{HEAD}
            <owl:Class rdf:about="http://ex.org/a/Thing">
              <rdfs:label xml:lang="de">Ding</rdfs:label>
              <rdfs:label xml:lang="en">thing</rdfs:label>
              <dct:description>a  described
                 thing</dct:description>
              <skos:definition>a defined thing</skos:definition>
            </owl:Class>
            <owl:Class rdf:about="http://ex.org/a/Bare"><rdfs:label>bare</rdfs:label></owl:Class>
            </rdf:RDF>"#
        ))
        .unwrap();
        assert_eq!(ds.entry_count(), 1);
        let g = &ds.groups[0];
        assert_eq!(g.group_id, "http://ex.org/a/");
        assert_eq!(g.labels[0].text, "thing");
        assert_eq!(g.glossary[0].text, "a defined thing");
    }

    #[test]
    fn description_used_when_no_definition() {
        let ds = one(&format!(
            r#"{HEAD}<rdf:Description rdf:about="http://ex.org/b#X">
              <rdfs:label>x</rdfs:label><dct:Description>an x</dct:Description>
            </rdf:Description></rdf:RDF>"#
        ))
        .unwrap();
        assert_eq!(ds.groups[0].glossary[0].text, "an x");
        assert_eq!(ds.groups[0].group_id, "http://ex.org/b#");
    }

    #[test]
    fn ontology_header_and_empty() {
        let err = one(&format!(
            r#"{HEAD}<owl:Ontology rdf:about="http://ex.org/o/">
              <rdfs:label>o</rdfs:label><skos:definition>the ontology</skos:definition>
            </owl:Ontology></rdf:RDF>"#
        ))
        .unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)), "{err}");
    }

    #[test]
    fn xml_error_has_location() {
        match one("<rdf:RDF>\n<unclosed>").unwrap_err() {
            Error::Parse { line, .. } => assert!(line.is_some()),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn namespace_truncation() {
        assert_eq!(
            iri_namespace("https://x/fibo/FND/Acc/Amount"),
            "https://x/fibo/FND/Acc/"
        );
        assert_eq!(iri_namespace("http://x/o#Y"), "http://x/o#");
        assert_eq!(iri_namespace("urn"), "urn");
    }
}

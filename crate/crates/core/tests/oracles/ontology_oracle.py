#!/usr/bin/env python3
"""Reference extraction of (label, definition) entries from RDF/XML files.

Written against xml.etree (expat) independently of the Rust extractor.
Prints the expected dataset as JSON; the fixture tests compare against the
frozen output in fixtures/*_expected.json.

usage: ontology_oracle.py FILE... > expected.json
"""
import json
import sys
import xml.etree.ElementTree as ET
from urllib.parse import urljoin

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
SKOS = "http://www.w3.org/2004/02/skos/core#"
OWL = "http://www.w3.org/2002/07/owl#"
XML_LANG = "{http://www.w3.org/XML/1998/namespace}lang"
XML_BASE = "{http://www.w3.org/XML/1998/namespace}base"


def split(tag):
    ns, _, local = tag[1:].partition("}")
    return ns, local


def lang_of(elem, parents):
    while elem is not None:
        if XML_LANG in elem.attrib:
            return elem.attrib[XML_LANG]
        elem = parents.get(elem)
    return ""


def lang_rank(lang):
    if lang == "":
        return 1
    low = lang.lower()
    if low == "en" or low.startswith("en-"):
        return 0
    return None


def text_of(elem):
    if ("{%s}resource" % RDF) in elem.attrib:
        return None
    t = " ".join("".join(elem.itertext()).split())
    return t or None


def scan(path, acc):
    tree = ET.parse(path)
    root = tree.getroot()
    parents = {c: p for p in root.iter() for c in p}
    base = root.attrib.get(XML_BASE)

    def is_node(e):
        p = parents.get(e)
        if p is None:
            return False
        if p is root:
            return True
        gp = parents.get(p)
        if gp is None or not is_node(p):
            return False
        return p.attrib.get("{%s}parseType" % RDF) != "Literal"

    for e in root.iter():
        if e is root or not is_node(e):
            continue
        about = e.attrib.get("{%s}about" % RDF)
        if about is None and parents.get(e) is root and ("{%s}ID" % RDF) in e.attrib:
            about = "#" + e.attrib["{%s}ID" % RDF]
        if about is None:
            continue
        if base and ":" not in about.split("/")[0]:
            about = urljoin(base, about)
        slot = acc.setdefault(about, {"label": None, "text": None, "header": False})
        if e.tag == "{%s}Ontology" % OWL:
            slot["header"] = True
        for prop in e:
            if not isinstance(prop.tag, str):
                continue
            ns, local = split(prop.tag)
            if ns == RDF and local == "type":
                if prop.attrib.get("{%s}resource" % RDF) == OWL + "Ontology":
                    slot["header"] = True
                continue
            lr = lang_rank(lang_of(prop, parents))
            if lr is None:
                continue
            if (ns, local) in ((RDFS, "label"), (SKOS, "prefLabel")):
                kind = 0 if local == "label" else 1
                slot_name = "label"
            elif local.lower() in ("definition", "description"):
                kind = 0 if local.lower() == "definition" else 1
                slot_name = "text"
            else:
                continue
            value = text_of(prop)
            if value is None:
                continue
            rank = (kind, lr)
            if slot[slot_name] is None or rank < slot[slot_name][0]:
                slot[slot_name] = (rank, value)


def namespace(iri):
    cut = max(iri.rfind("#"), iri.rfind("/"))
    return iri[: cut + 1] if cut >= 0 else iri


def main(paths):
    acc = {}
    for p in sorted(paths):
        scan(p, acc)
    groups = {}
    for iri in sorted(acc):
        s = acc[iri]
        if s["header"] or s["label"] is None or s["text"] is None:
            continue
        groups.setdefault(namespace(iri), []).append(
            {"iri": iri, "label": s["label"][1], "description": s["text"][1]}
        )
    out = {
        "entry_count": sum(len(v) for v in groups.values()),
        "group_count": len(groups),
        "groups": [{"group_id": k, "entries": groups[k]} for k in sorted(groups)],
    }
    json.dump(out, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main(sys.argv[1:])

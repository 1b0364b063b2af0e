"""Resolve assessment targets and harvest their metadata into a normalized graph.

Statements are collected from four channels, in this priority order:

1. JSON-LD ``<script>`` blocks embedded in the landing page
2. ``<meta>`` tags with Dublin Core, DataCite or ``citation_`` names
3. sidecar records next to the landing page (``record.jsonld``, ``record.ttl``,
   ``record.dc.xml``)
4. registry records (``registry/*.json`` / ``registry/*.jsonld``)

Source-specific property names are folded into a small canonical vocabulary
(``title``, ``creator``, ``license``, ``file.locator`` ...). Unmapped
properties keep their full IRI as key. A channel that fails to parse adds a
warning and contributes nothing; it never aborts the harvest.
"""

from __future__ import annotations

import json
import logging
import re
import urllib.error
import urllib.request
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from html.parser import HTMLParser
from pathlib import Path
from typing import Callable, Iterable
from urllib.parse import urljoin, urlparse

from .errors import FetchFailed, TargetUnreadable

log = logging.getLogger(__name__)

CHANNELS = ("embedded-structured-block", "html-meta-tag", "sidecar-record", "registry-record")

SCHEMA_ORG = "http://schema.org/"
DC = "http://purl.org/dc/elements/1.1/"
DCTERMS = "http://purl.org/dc/terms/"
PROV = "http://www.w3.org/ns/prov#"
PAV = "http://purl.org/pav/"
DCAT = "http://www.w3.org/ns/dcat#"
SPDX = "http://spdx.org/rdf/terms#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
DATACITE = "http://datacite.org/schema/kernel-4/"


# -- data model ----------------------------------------------------------------

_HEX = re.compile(r"^[0-9a-fA-F]+$")


@dataclass(frozen=True)
class DataFile:
    locator: str
    declared_size: int | None = None
    media_type: str | None = None
    checksum: tuple[str, str] | None = None
    format_label: str | None = None

    def __post_init__(self):
        if not self.locator:
            raise ValueError("data file locator must be non-empty")
        if self.checksum is not None and not _HEX.match(self.checksum[1]):
            raise ValueError(f"checksum digest {self.checksum[1]!r} is not hex")


@dataclass(frozen=True)
class AssessmentTarget:
    identifier: str
    kind: str  # live-url | fixture-dir | manifest-file
    data_files: tuple[DataFile, ...] = ()
    publisher_hint: str | None = None
    location: str | None = None

    def __post_init__(self):
        if not self.identifier:
            raise TargetUnreadable("target identifier must be non-empty")


@dataclass(frozen=True)
class MetadataStatement:
    key: str
    value: str
    channel: str


@dataclass(frozen=True)
class MetadataGraph:
    statements: tuple[MetadataStatement, ...] = ()
    namespaces: frozenset[str] = frozenset()
    formats: frozenset[str] = frozenset()
    schema_ids: frozenset[str] = frozenset()
    data_files: tuple[DataFile, ...] = ()
    warnings: tuple[str, ...] = ()

    def values(self, key: str) -> list[str]:
        return [s.value for s in self.statements if s.key == key]

    def has(self, key: str) -> bool:
        return any(s.key == key for s in self.statements)

    def keys(self) -> set[str]:
        return {s.key for s in self.statements}


# -- identifiers ---------------------------------------------------------------

PERSISTENT_SCHEMES = frozenset({"doi", "handle", "ark", "purl", "urn", "w3id"})

# (scheme, pattern); first match wins
PID_PATTERNS: list[tuple[str, re.Pattern]] = [
    ("doi", re.compile(r"^(?:doi:|info:doi/|https?://(?:dx\.)?doi\.org/)?10\.\d{4,9}/\S+$", re.I)),
    ("handle", re.compile(r"^(?:hdl:|https?://hdl\.handle\.net/)\d+(?:\.\d+)*/\S+$", re.I)),
    ("ark", re.compile(r"^(?:https?://[^/\s]+/)?ark:/?\d{5,9}/\S+$", re.I)),
    ("purl", re.compile(r"^https?://purl\.(?:org|oclc\.org|archive\.org|obolibrary\.org|fdlp\.gov)/\S+$", re.I)),
    ("w3id", re.compile(r"^https?://w3id\.org/\S+$", re.I)),
    ("uuid", re.compile(r"^(?:urn:uuid:)?[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}$", re.I)),
    ("urn", re.compile(r"^urn:[a-z0-9][a-z0-9-]{0,31}:\S+$", re.I)),
    ("url", re.compile(r"^(?:https?|ftp)://[^\s/?#]+\.[^\s/?#]+(?:[/?#]\S*)?$", re.I)),
]


@dataclass(frozen=True)
class IdentifierClass:
    scheme: str
    persistent: bool
    globally_unique: bool


def classify_identifier(identifier: str, extra_patterns: Iterable[tuple[str, str]] = ()) -> IdentifierClass:
    """Classify an identifier by scheme.

    ``extra_patterns`` are ``(scheme, regex)`` pairs tried before the built-in
    table; their schemes count as persistent.
    """
    text = (identifier or "").strip()
    for scheme, pattern in extra_patterns:
        if re.match(pattern, text, re.I):
            return IdentifierClass(scheme, True, True)
    for scheme, pattern in PID_PATTERNS:
        if pattern.match(text):
            return IdentifierClass(scheme, scheme in PERSISTENT_SCHEMES, True)
    return IdentifierClass("unknown", False, False)


# -- canonical key mapping -------------------------------------------------------

def strip_scheme(iri: str) -> str:
    return re.sub(r"^https?://", "", iri)


def namespace_of(iri: str) -> str:
    """Split an IRI after its last ``#`` or ``/``."""
    for sep in ("#", "/"):
        i = iri.rfind(sep)
        if i > len("https://") and i < len(iri) - 1:
            return iri[: i + 1]
    return iri


def _k(ns: str, *names: str) -> dict[str, str]:
    return {strip_scheme(ns) + n: n for n in names}


# full IRI (scheme stripped) -> canonical key
KEY_MAP: dict[str, str] = {}
for _ns in (SCHEMA_ORG, "https://schema.org/"):
    base = strip_scheme(_ns)
    KEY_MAP.update({
        base + "name": "title",
        base + "headline": "title",
        base + "creator": "creator",
        base + "author": "creator",
        base + "publisher": "publisher",
        base + "provider": "publisher",
        base + "datePublished": "publication_date",
        base + "description": "description",
        base + "abstract": "description",
        base + "keywords": "keywords",
        base + "identifier": "identifier",
        base + "license": "license",
        base + "conditionsOfAccess": "access_level",
        base + "isAccessibleForFree": "access_level",
        base + "isPartOf": "related",
        base + "hasPart": "related",
        base + "citation": "related",
        base + "isBasedOn": "related",
        base + "relatedLink": "related",
        base + "subjectOf": "related",
        base + "publishingPrinciples": "preservation_policy",
        base + "schemaVersion": "schema_id",
        base + "additionalType": "resource_type",
        base + "contentUrl": "file.locator",
        base + "url": "url",
        base + "encodingFormat": "file.media_type",
        base + "fileFormat": "file.media_type",
        base + "contentSize": "file.size",
        base + "sha256": "file.checksum",
        base + "dateCreated": "provenance.dateCreated",
    })
for _ns in (DC, DCTERMS):
    base = strip_scheme(_ns)
    KEY_MAP.update({
        base + "title": "title",
        base + "creator": "creator",
        base + "publisher": "publisher",
        base + "date": "publication_date",
        base + "issued": "publication_date",
        base + "description": "description",
        base + "abstract": "description",
        base + "subject": "keywords",
        base + "identifier": "identifier",
        base + "type": "resource_type",
        base + "rights": "license",
        base + "license": "license",
        base + "accessRights": "access_level",
        base + "relation": "related",
        base + "isPartOf": "related",
        base + "references": "related",
        base + "isReferencedBy": "related",
        base + "source": "related",
        base + "conformsTo": "schema_id",
        base + "format": "file.media_type",
    })
KEY_MAP.update({
    strip_scheme(DCAT) + "downloadURL": "file.locator",
    strip_scheme(DCAT) + "accessURL": "file.locator",
    strip_scheme(DCAT) + "mediaType": "file.media_type",
    strip_scheme(DCAT) + "byteSize": "file.size",
    strip_scheme(DCAT) + "keyword": "keywords",
    strip_scheme(SPDX) + "checksum": "file.checksum",
    strip_scheme(SPDX) + "checksumValue": "file.checksum",
})

# keys whose nested object describes a data file
DISTRIBUTION_KEYS = {
    strip_scheme(SCHEMA_ORG) + "distribution",
    "schema.org/distribution",
    strip_scheme(DCAT) + "distribution",
}

# object types that make a JSON-LD node a dataset description
DATASET_TYPES = {"Dataset", "CreativeWork", "SoftwareSourceCode", "DataCatalog", "Collection", "dcat:Dataset"}

# namespace (scheme stripped) -> metadata schema id
SCHEMA_NAMESPACES = {
    "schema.org/": "schema.org",
    strip_scheme(DC): "dublin-core",
    strip_scheme(DCTERMS): "dublin-core",
    strip_scheme(DATACITE): "datacite",
    "purl.org/spar/datacite/": "datacite",
    strip_scheme(DCAT): "dcat",
    "ddialliance.org/Specification/DDI-Lifecycle/3.3/XMLSchema/": "ddi",
    "rdf-vocabulary.ddialliance.org/discovery#": "ddi",
    "rs.tdwg.org/dwc/terms/": "darwin-core",
    "eml.ecoinformatics.org/eml-2.2.0": "eml",
    "www.isotc211.org/2005/gmd": "iso-19115",
    "github.com/HPC-FAIR/HPC-Ontology#": "hpc-ontology",
}


def canonical_key(iri: str) -> str:
    bare = strip_scheme(iri)
    if bare in KEY_MAP:
        return KEY_MAP[bare]
    for ns in (PROV, PAV):
        if bare.startswith(strip_scheme(ns)):
            return "provenance." + bare[len(strip_scheme(ns)):]
    return iri


def schema_for_namespace(ns: str) -> str | None:
    return SCHEMA_NAMESPACES.get(strip_scheme(ns))


# -- statement collection ------------------------------------------------------

class _Collector:
    """Accumulates statements, namespaces and file records for one harvest."""

    def __init__(self):
        self.statements: list[MetadataStatement] = []
        self.namespaces: list[str] = []
        self.formats: list[str] = []
        self.schema_ids: list[str] = []
        self.files: list[DataFile] = []
        self.warnings: list[str] = []

    def add_ns(self, ns: str) -> None:
        if ns and ns not in self.namespaces:
            self.namespaces.append(ns)
        schema = schema_for_namespace(ns)
        if schema and schema not in self.schema_ids:
            self.schema_ids.append(schema)

    def add_format(self, fmt: str) -> None:
        if fmt not in self.formats:
            self.formats.append(fmt)

    def add(self, key: str, value, channel: str) -> None:
        if value is None:
            return
        text = str(value).strip()
        if not text:
            return
        if key == "schema_id":
            schema = schema_for_namespace(text) or text.lower()
            if schema not in self.schema_ids:
                self.schema_ids.append(schema)
        self.statements.append(MetadataStatement(key, text, channel))

    def graph(self) -> MetadataGraph:
        return MetadataGraph(
            statements=tuple(self.statements),
            namespaces=frozenset(self.namespaces),
            formats=frozenset(self.formats),
            schema_ids=frozenset(self.schema_ids),
            data_files=tuple(self.files),
            warnings=tuple(self.warnings),
        )


class _Nested(tuple):
    """Expanded (iri, value) pairs of a nested node."""


def _many(value) -> list:
    return value if isinstance(value, list) else [value]


def _as_text(value) -> str | None:
    """Reduce a JSON-LD / RDF value to a display string."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (str, int, float)):
        return str(value)
    if isinstance(value, dict):
        for k in ("@value", "name", "schema:name", "@id", "url", "value"):
            if k in value and not isinstance(value[k], (dict, list)):
                return str(value[k])
    return None


def _parse_checksum(text: str) -> tuple[str, str] | None:
    algo, sep, digest = text.partition(":")
    if not sep:
        algo, digest = "sha256", text
    digest = digest.strip()
    if digest and _HEX.match(digest):
        return algo.strip().lower() or "sha256", digest.lower()
    return None


def _size(text: str | None) -> int | None:
    if text is None:
        return None
    m = re.match(r"^\s*(\d+)\s*(?:b|bytes)?\s*$", str(text), re.I)
    return int(m.group(1)) if m else None


def _emit_properties(col: _Collector, props, channel: str, track_ns: bool = False) -> None:
    """Emit statements for a dataset node given expanded (iri, value) pairs.

    ``track_ns`` records property namespaces; only for syntaxes where they are
    written out (Turtle, XML).
    """
    for iri, value in props:
        if track_ns:
            col.add_ns(namespace_of(iri))
        bare = strip_scheme(iri)
        if bare in DISTRIBUTION_KEYS:
            for dist in _many(value):
                if isinstance(dist, _Nested):
                    _emit_distribution(col, dist, channel, track_ns)
            continue
        key = canonical_key(iri)
        if key == "access_level" and bare.endswith("isAccessibleForFree"):
            for v in _many(value):
                text = _as_text(v)
                col.add(key, "open" if text and text.lower() == "true" else "restricted", channel)
            continue
        for v in _many(value):
            if isinstance(v, _Nested):
                # nested node: keep its display text only
                inner = dict((strip_scheme(k), _as_text(x)) for k, x in v if _as_text(x))
                text = next(
                    (inner[k] for k in inner if k.endswith(("/name", "#name", "/url", "@id"))),
                    None,
                ) or next(iter(inner.values()), None)
                col.add(key, text, channel)
            else:
                col.add(key, _as_text(v), channel)


def _emit_distribution(col: _Collector, props, channel: str, track_ns: bool = False) -> None:
    fields: dict[str, str] = {}
    for iri, value in props:
        if track_ns and iri != "@id":
            col.add_ns(namespace_of(iri))
        key = canonical_key(iri)
        if key == "url":
            key = "file.locator"
        if not key.startswith("file."):
            continue
        for v in _many(value):
            if isinstance(v, _Nested):
                inner = {strip_scheme(k): _as_text(x) for k, x in v}
                v = next((t for k, t in inner.items() if k.endswith(("checksumValue", "value"))), None)
                algo = next((t for k, t in inner.items() if k.endswith("algorithm")), None)
                if v and algo:
                    v = f"{algo.rsplit('_', 1)[-1].rsplit('#', 1)[-1].lower()}:{v}"
            text = _as_text(v)
            if text:
                col.add(key, text, channel)
                fields.setdefault(key, text)
    locator = fields.get("file.locator")
    if locator:
        checksum = _parse_checksum(fields["file.checksum"]) if "file.checksum" in fields else None
        col.files.append(
            DataFile(
                locator=locator,
                declared_size=_size(fields.get("file.size")),
                media_type=fields.get("file.media_type"),
                checksum=checksum,
                format_label=media_format(fields.get("file.media_type")),
            )
        )


# -- JSON-LD (lightweight expansion, no remote contexts) ------------------------

def _context_map(ctx, col: _Collector) -> tuple[str | None, dict[str, str]]:
    vocab: str | None = None
    prefixes: dict[str, str] = {}
    items = ctx if isinstance(ctx, list) else [ctx]
    for item in items:
        if isinstance(item, str):
            vocab = item if item.endswith(("/", "#")) else item + "/"
            col.add_ns(vocab)
        elif isinstance(item, dict):
            for k, v in item.items():
                if k == "@vocab" and isinstance(v, str):
                    vocab = v
                    col.add_ns(v)
                elif isinstance(v, str) and "://" in v:
                    prefixes[k] = v
                    col.add_ns(v)
                elif isinstance(v, dict) and isinstance(v.get("@id"), str):
                    prefixes[k] = v["@id"]
    return vocab, prefixes


def _expand_key(key: str, vocab: str | None, prefixes: dict[str, str]) -> str | None:
    if key.startswith("@"):
        return None
    if "://" in key:
        return key
    prefix, sep, local = key.partition(":")
    if sep and prefix in prefixes:
        return prefixes[prefix] + local
    if sep and prefix == "schema":
        return SCHEMA_ORG + local
    if key in prefixes:
        return prefixes[key]
    return (vocab or SCHEMA_ORG) + key


def _jsonld_props(node: dict, vocab, prefixes, col: _Collector) -> list[tuple[str, object]]:
    out = []
    for key, value in node.items():
        iri = _expand_key(key, vocab, prefixes)
        if iri is None:
            continue
        if "://" in key:
            col.add_ns(namespace_of(key))
        out.append((iri, _jsonld_value(value, vocab, prefixes, col)))
    return out


def _jsonld_value(value, vocab, prefixes, col):
    if isinstance(value, list):
        return [_jsonld_value(v, vocab, prefixes, col) for v in value]
    if isinstance(value, dict) and "@value" not in value and set(value) != {"@id"}:
        inner = _jsonld_props(value, vocab, prefixes, col)
        if "@id" in value:
            inner.append(("@id", value["@id"]))
        return _Nested(inner)
    return value


def _types(node: dict) -> list[str]:
    t = node.get("@type", [])
    return [t] if isinstance(t, str) else list(t)


def harvest_jsonld(data, col: _Collector, channel: str) -> None:
    docs = data if isinstance(data, list) else [data]
    for doc in docs:
        if not isinstance(doc, dict):
            continue
        vocab, prefixes = _context_map(doc.get("@context"), col)
        nodes = doc.get("@graph") if isinstance(doc.get("@graph"), list) else [doc]
        main = next(
            (n for n in nodes if isinstance(n, dict) and set(_types(n)) & DATASET_TYPES),
            next((n for n in nodes if isinstance(n, dict)), None),
        )
        if main is None:
            continue
        if isinstance(main.get("@id"), str):
            col.add("identifier", main["@id"], channel)
        for t in _types(main):
            col.add("resource_type", t.split(":")[-1], channel)
        _emit_properties(col, _jsonld_props(main, vocab, prefixes, col), channel)


# -- HTML ----------------------------------------------------------------------

META_PREFIXES = {
    "dc.": DC,
    "dcterms.": DCTERMS,
    "dct.": DCTERMS,
}
CITATION_META = {
    "citation_title": "title",
    "citation_author": "creator",
    "citation_publisher": "publisher",
    "citation_publication_date": "publication_date",
    "citation_date": "publication_date",
    "citation_doi": "identifier",
    "citation_keywords": "keywords",
    "citation_abstract": "description",
    "citation_pdf_url": "file.locator",
}
DATACITE_META = {
    "title": "title",
    "creator": "creator",
    "publisher": "publisher",
    "publicationyear": "publication_date",
    "identifier": "identifier",
    "resourcetype": "resource_type",
    "rights": "license",
    "subject": "keywords",
    "description": "description",
    "relatedidentifier": "related",
}


class _LandingParser(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.meta: list[tuple[str, str]] = []
        self.scripts: list[str] = []
        self.links: list[dict[str, str]] = []
        self.html_prefix: str | None = None
        self._in_jsonld = False
        self._buf: list[str] = []

    def handle_starttag(self, tag, attrs):
        a = {k.lower(): (v or "") for k, v in attrs}
        if tag == "html" and a.get("prefix"):
            self.html_prefix = a["prefix"]
        elif tag == "meta":
            name = a.get("name") or a.get("property")
            if name and "content" in a:
                self.meta.append((name, a["content"]))
        elif tag == "script" and a.get("type", "").lower() == "application/ld+json":
            self._in_jsonld = True
            self._buf = []
        elif tag == "link":
            self.links.append(a)

    def handle_data(self, data):
        if self._in_jsonld:
            self._buf.append(data)

    def handle_endtag(self, tag):
        if tag == "script" and self._in_jsonld:
            self._in_jsonld = False
            self.scripts.append("".join(self._buf))


def harvest_html(html: str, col: _Collector) -> _LandingParser:
    parser = _LandingParser()
    parser.feed(html)
    parser.close()
    col.add_format("html")

    for i, block in enumerate(parser.scripts):
        try:
            data = json.loads(block)
        except json.JSONDecodeError as exc:
            col.warnings.append(f"embedded-structured-block #{i}: {exc}")
            continue
        col.add_format("json-ld")
        harvest_jsonld(data, col, "embedded-structured-block")

    for link in parser.links:
        if link.get("rel", "").lower().startswith("schema.") and "://" in link.get("href", ""):
            col.add_ns(link["href"])

    if parser.html_prefix:
        for m in re.finditer(r"(\S+):\s+(\S+)", parser.html_prefix):
            col.add_ns(m.group(2))

    for name, content in parser.meta:
        low = name.lower()
        for prefix, ns in META_PREFIXES.items():
            if low.startswith(prefix):
                local = name[len(prefix):]
                iri = ns + local
                key = canonical_key(iri)
                if key == "file.media_type":
                    key = iri
                col.add(key, content, "html-meta-tag")
                break
        else:
            if low in CITATION_META:
                col.add(CITATION_META[low], content, "html-meta-tag")
            elif low.startswith("datacite.") and low[len("datacite."):] in DATACITE_META:
                col.add(DATACITE_META[low[len("datacite."):]], content, "html-meta-tag")
    return parser


# -- Turtle and DC-XML sidecars -------------------------------------------------

def harvest_turtle(text: str, col: _Collector, channel: str, base: str | None = None) -> None:
    import rdflib

    g = rdflib.Graph(bind_namespaces="none")
    g.parse(data=text, format="turtle", publicID=base)
    col.add_format("turtle")
    for _, ns in g.namespaces():
        col.add_ns(str(ns))

    dataset_types = {rdflib.URIRef(DCAT + "Dataset"), rdflib.URIRef(SCHEMA_ORG + "Dataset"),
                     rdflib.URIRef("https://schema.org/Dataset")}
    subjects = sorted({s for s, _, o in g.triples((None, rdflib.RDF.type, None)) if o in dataset_types})
    if not subjects:
        counts: dict = {}
        for s in g.subjects():
            if isinstance(s, rdflib.URIRef):
                counts[s] = counts.get(s, 0) + 1
        if not counts:
            return
        subjects = [max(sorted(counts), key=lambda s: counts[s])]
    main = subjects[0]

    def props_of(subject, depth=0):
        out = []
        for p, o in sorted(g.predicate_objects(subject)):
            if p == rdflib.RDF.type:
                continue
            if isinstance(o, rdflib.BNode) and depth < 3:
                out.append((str(p), _Nested(props_of(o, depth + 1))))
            else:
                out.append((str(p), str(o)))
        return out

    col.add("identifier", str(main), channel)
    for t in sorted(g.objects(main, rdflib.RDF.type)):
        col.add_ns(namespace_of(str(t)))
        col.add("resource_type", str(t).rsplit("/", 1)[-1].rsplit("#", 1)[-1], channel)
    _emit_properties(col, props_of(main), channel, track_ns=True)


def harvest_dc_xml(text: str, col: _Collector, channel: str) -> None:
    root = ET.fromstring(text)
    col.add_format("dc-xml")
    props = []
    for el in root.iter():
        if not el.tag.startswith("{"):
            continue
        ns, local = el.tag[1:].split("}", 1)
        if ns in (DC, DCTERMS):
            col.add_ns(ns)
            value = (el.text or "").strip() or el.attrib.get(f"{{{RDF}}}resource", "")
            if value:
                props.append((ns + local, value))
    _emit_properties(col, props, channel, track_ns=True)


# -- targets -------------------------------------------------------------------

MEDIA_FORMATS = {
    "text/csv": "csv",
    "application/csv": "csv",
    "application/json": "json",
    "application/ld+json": "json-ld",
    "text/turtle": "turtle",
    "application/n-triples": "n-triples",
    "text/plain": "plain text",
    "application/x-hdf5": "hdf5",
    "application/x-hdf": "hdf5",
    "application/x-netcdf": "netcdf",
    "application/netcdf": "netcdf",
    "application/rdf+xml": "rdf-xml",
    "application/xml": "xml",
    "text/xml": "xml",
    "application/zip": "zip",
    "application/pdf": "pdf",
    "application/vnd.ms-excel": "xls",
    "application/vnd.openxmlformats-officedocument.spreadsheetml.sheet": "xlsx",
}


def media_format(media_type: str | None) -> str | None:
    if not media_type:
        return None
    mt = media_type.split(";")[0].strip().lower()
    return MEDIA_FORMATS.get(mt, mt)


def parse_manifest(text: str, source: str = "<manifest>") -> tuple[dict[str, str], list[DataFile]]:
    """Parse ``files.manifest`` syntax.

    Returns header fields (``key=value`` lines such as ``identifier=...``)
    and one :class:`DataFile` per ``locator<TAB>size<TAB>media_type<TAB>sha256:<hex>``
    line. Empty fields or ``-`` mean unknown.
    """
    header: dict[str, str] = {}
    files: list[DataFile] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line and re.match(r"^[A-Za-z_][\w-]*=", line):
            key, _, value = line.partition("=")
            header[key.strip()] = value.strip()
            continue
        parts = [p.strip() for p in line.split("\t")]
        parts += [""] * (4 - len(parts))
        locator, size, media, checksum = parts[:4]

        def known(x: str) -> str | None:
            return None if x in ("", "-") else x

        size_v = None
        if known(size):
            if not size.isdigit():
                raise TargetUnreadable(f"{source}:{lineno}: size {size!r} is not an integer")
            size_v = int(size)
        checksum_v = None
        if known(checksum):
            checksum_v = _parse_checksum(checksum)
            if checksum_v is None:
                raise TargetUnreadable(f"{source}:{lineno}: checksum {checksum!r} is not <algo>:<hex>")
        if not locator:
            raise TargetUnreadable(f"{source}:{lineno}: empty locator")
        files.append(
            DataFile(
                locator=locator,
                declared_size=size_v,
                media_type=known(media),
                checksum=checksum_v,
                format_label=media_format(known(media)),
            )
        )
    return header, files


def _is_url(spec: str) -> bool:
    return bool(re.match(r"^[a-z][a-z0-9+.-]*://", spec, re.I))


def _fixture_identifier(path: Path, header: dict[str, str]) -> str:
    if header.get("identifier"):
        return header["identifier"]
    record = path / "record.jsonld"
    if record.is_file():
        try:
            data = json.loads(record.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            data = None
        if isinstance(data, dict):
            for key in ("@id", "identifier", "url"):
                if isinstance(data.get(key), str):
                    return data[key]
    return str(path)


def load_target(spec: str, *, offline: bool = False) -> AssessmentTarget:
    """Resolve a target spec (URL, fixture directory or manifest file)."""
    if not spec or not spec.strip():
        raise TargetUnreadable("empty target")
    spec = spec.strip()
    if _is_url(spec):
        if offline:
            log.info("target %s is live but network access is disabled", spec)
        return AssessmentTarget(identifier=spec, kind="live-url", location=spec)

    path = Path(spec)
    if path.is_dir():
        header: dict[str, str] = {}
        files: list[DataFile] = []
        manifest = path / "files.manifest"
        if manifest.is_file():
            header, files = parse_manifest(manifest.read_text(encoding="utf-8"), str(manifest))
        publisher = header.get("publisher")
        pub_file = path / "publisher.txt"
        if pub_file.is_file():
            publisher = pub_file.read_text(encoding="utf-8").strip() or publisher
        return AssessmentTarget(
            identifier=_fixture_identifier(path, header),
            kind="fixture-dir",
            data_files=tuple(files),
            publisher_hint=publisher,
            location=str(path),
        )
    if path.is_file():
        header, files = parse_manifest(path.read_text(encoding="utf-8"), str(path))
        if not header.get("identifier"):
            raise TargetUnreadable(f"{path}: manifest lacks an identifier= header line")
        return AssessmentTarget(
            identifier=header["identifier"],
            kind="manifest-file",
            data_files=tuple(files),
            publisher_hint=header.get("publisher"),
            location=str(path),
        )
    raise TargetUnreadable(f"{spec}: no such file or directory")


# -- fetch boundary ------------------------------------------------------------

Fetcher = Callable[[str, str], tuple[str, bytes]]


def urllib_fetch(url: str, accept: str = "text/html") -> tuple[str, bytes]:
    """Fetch a URL, returning (content type, body)."""
    req = urllib.request.Request(url, headers={"Accept": accept, "User-Agent": "fairgauge/0.1"})
    try:
        with urllib.request.urlopen(req, timeout=30) as resp:
            return resp.headers.get("Content-Type", ""), resp.read()
    except (urllib.error.URLError, OSError, ValueError) as exc:
        raise FetchFailed(f"{url}: {exc}") from exc


ALTERNATE_TYPES = {
    "application/ld+json": "jsonld",
    "text/turtle": "ttl",
    "application/xml": "dc-xml",
}


def harvest(target: AssessmentTarget, *, fetch: Fetcher | None = None, offline: bool = False) -> MetadataGraph:
    """Harvest a metadata graph for ``target``.

    Live targets use ``fetch`` (default: urllib); ``offline=True`` forbids it.
    """
    col = _Collector()
    if target.kind == "live-url":
        if offline:
            raise FetchFailed(f"{target.identifier}: live fetch forbidden (offline mode)")
        _harvest_live(target, col, fetch or urllib_fetch)
    elif target.kind == "fixture-dir":
        _harvest_fixture(Path(target.location or target.identifier), col)
    elif target.kind == "manifest-file":
        base = Path(target.location or target.identifier).parent
        _harvest_registry(base, col)
    for w in col.warnings:
        log.warning("harvest: %s", w)
    return col.graph()


def _try(col: _Collector, channel: str, fn, *args) -> None:
    try:
        fn(*args)
    except Exception as exc:  # noqa: BLE001 - channel failures are warnings by contract
        col.warnings.append(f"{channel}: {type(exc).__name__}: {exc}")


def _harvest_fixture(path: Path, col: _Collector) -> None:
    landing = path / "landing.html"
    if landing.is_file():
        _try(col, "landing.html", harvest_html, landing.read_text(encoding="utf-8"), col)
    sidecars = (
        ("record.jsonld", lambda t: harvest_jsonld(json.loads(t), col, "sidecar-record"), "json-ld"),
        ("record.ttl", lambda t: harvest_turtle(t, col, "sidecar-record"), None),
        ("record.dc.xml", lambda t: harvest_dc_xml(t, col, "sidecar-record"), None),
    )
    for name, fn, fmt in sidecars:
        f = path / name
        if not f.is_file():
            continue
        before = len(col.warnings)
        _try(col, name, fn, f.read_text(encoding="utf-8"))
        if fmt and len(col.warnings) == before:
            col.add_format(fmt)
    _harvest_registry(path, col)


def _harvest_registry(path: Path, col: _Collector) -> None:
    reg = path / "registry"
    if not reg.is_dir():
        return
    for f in sorted(reg.iterdir()):
        if f.suffix not in (".json", ".jsonld"):
            continue
        before = len(col.warnings)
        _try(col, f"registry/{f.name}", lambda t: harvest_jsonld(json.loads(t), col, "registry-record"),
             f.read_text(encoding="utf-8"))
        if len(col.warnings) == before:
            col.add_format("json-ld")


def _harvest_live(target: AssessmentTarget, col: _Collector, fetch: Fetcher) -> None:
    ctype, body = fetch(target.identifier, "text/html")
    text = body.decode("utf-8", errors="replace")
    parser = None
    if "html" in ctype or text.lstrip().lower().startswith(("<!doctype html", "<html")):
        parser = _LandingParser()
        _try(col, "landing page", lambda: setattr(col, "_parser", harvest_html(text, col)))
        parser = getattr(col, "_parser", None)
    elif "json" in ctype:
        _try(col, "json-ld", harvest_jsonld, json.loads(text), col, "sidecar-record")
        col.add_format("json-ld")
    if parser is None:
        return
    # content negotiation via advertised alternates
    for link in parser.links:
        if "alternate" not in link.get("rel", "").lower():
            continue
        kind = ALTERNATE_TYPES.get(link.get("type", "").lower())
        href = link.get("href")
        if not kind or not href:
            continue
        url = urljoin(target.identifier, href)
        try:
            _, data = fetch(url, link["type"])
        except FetchFailed as exc:
            col.warnings.append(f"alternate {url}: {exc}")
            continue
        payload = data.decode("utf-8", errors="replace")
        if kind == "jsonld":
            _try(col, url, harvest_jsonld, json.loads(payload), col, "sidecar-record")
            col.add_format("json-ld")
        elif kind == "ttl":
            _try(col, url, harvest_turtle, payload, col, "sidecar-record", url)
        else:
            _try(col, url, harvest_dc_xml, payload, col, "sidecar-record")


def with_harvested_files(target: AssessmentTarget, graph: MetadataGraph) -> AssessmentTarget:
    """Live targets take their data files from the harvested metadata."""
    if target.data_files or not graph.data_files:
        return target
    return replace(target, data_files=graph.data_files)


def metadata_scheme(target: AssessmentTarget) -> str | None:
    """URL scheme through which the target's metadata is served."""
    if target.kind == "fixture-dir":
        landing = Path(target.location or target.identifier) / "landing.html"
        return "https" if landing.is_file() else None
    parsed = urlparse(target.location if target.kind == "live-url" else target.identifier)
    return parsed.scheme.lower() or None

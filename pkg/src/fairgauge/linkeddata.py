"""In-memory linked-data documents and their canonical JSON-LD / N-Triples forms.

A :class:`LinkedDataDoc` is a flat, ordered list of nodes. Property values are
either typed :class:`Literal` values or :class:`Ref` links to other nodes.
Serialization is canonical: context first, nodes in document order, properties
in insertion order, blank nodes renamed ``_:b<n>`` in first-use order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Iterable, Union

from .errors import LinkedDataError

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

DATATYPES = ("string", "integer", "decimal", "anyURI", "boolean")


@dataclass(frozen=True)
class Literal:
    value: Union[str, int, Decimal, bool]
    datatype: str = "string"

    def __post_init__(self):
        if self.datatype not in DATATYPES:
            raise LinkedDataError(f"unsupported literal datatype {self.datatype!r}")


@dataclass(frozen=True)
class Ref:
    id: str


Value = Union[Literal, Ref]


@dataclass(frozen=True)
class Node:
    id: str
    types: tuple[str, ...] = ()
    properties: tuple[tuple[str, Value], ...] = ()

    def values(self, key: str) -> list[Value]:
        return [v for k, v in self.properties if k == key]

    def first(self, key: str) -> Value | None:
        for k, v in self.properties:
            if k == key:
                return v
        return None

    @property
    def is_blank(self) -> bool:
        return self.id.startswith("_:")


@dataclass(frozen=True)
class LinkedDataDoc:
    context: dict[str, str] = field(default_factory=dict)
    nodes: tuple[Node, ...] = ()

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise LinkedDataError(f"no node {node_id!r} in document")

    def expand(self, name: str) -> str:
        return expand(name, self.context)

    def validate(self) -> None:
        """Blank-node references must resolve to a node of this document.

        References to named IRIs (units, external resources) are left alone.
        """
        ids = {n.id for n in self.nodes}
        if len(ids) != len(self.nodes):
            raise LinkedDataError("duplicate node ids")
        for n in self.nodes:
            for key, value in n.properties:
                if isinstance(value, Ref) and value.id.startswith("_:") and value.id not in ids:
                    raise LinkedDataError(f"{n.id}: {key} references unknown node {value.id!r}")


def expand(name: str, context: dict[str, str]) -> str:
    """Expand a compact ``prefix:local`` name against a prefix map."""
    if name.startswith("_:") or "://" in name:
        return name
    prefix, sep, local = name.partition(":")
    if sep and prefix in context:
        return context[prefix] + local
    return name


# -- JSON-LD -----------------------------------------------------------------

def _blank_namer(nodes: Iterable[Node]) -> dict[str, str]:
    names: dict[str, str] = {}

    def see(node_id: str) -> None:
        if node_id.startswith("_:") and node_id not in names:
            names[node_id] = f"_:b{len(names)}"

    for n in nodes:
        see(n.id)
        for _, value in n.properties:
            if isinstance(value, Ref):
                see(value.id)
    return names


def decimal_lexical(value) -> str:
    """xsd:decimal lexical form: plain digits, never exponent notation."""
    return format(Decimal(value), "f")


def _literal_json(lit: Literal):
    if lit.datatype == "string":
        return lit.value
    if lit.datatype == "integer":
        return int(lit.value)
    if lit.datatype == "boolean":
        return bool(lit.value)
    text = decimal_lexical(lit.value) if lit.datatype == "decimal" else str(lit.value)
    return {"@type": f"xsd:{lit.datatype}", "@value": text}


def to_jsonld(doc: LinkedDataDoc) -> dict:
    names = _blank_namer(doc.nodes)

    def rename(node_id: str) -> str:
        return names.get(node_id, node_id)

    graph = []
    for n in doc.nodes:
        obj: dict = {"@id": rename(n.id)}
        if n.types:
            obj["@type"] = n.types[0] if len(n.types) == 1 else list(n.types)
        grouped: dict[str, list] = {}
        for key, value in n.properties:
            if isinstance(value, Ref):
                item = {"@id": rename(value.id)}
            else:
                item = _literal_json(value)
            grouped.setdefault(key, []).append(item)
        for key, items in grouped.items():
            obj[key] = items[0] if len(items) == 1 else items
        graph.append(obj)
    context = dict(doc.context)
    context.setdefault("xsd", XSD)
    if not graph:
        return {"@context": context}
    return {"@context": context, "@graph": graph}


def serialize_linked_data(doc: LinkedDataDoc) -> bytes:
    text = json.dumps(to_jsonld(doc), indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def _parse_literal(raw, context: dict[str, str]) -> Value:
    if isinstance(raw, bool):
        return Literal(raw, "boolean")
    if isinstance(raw, int):
        return Literal(raw, "integer")
    if isinstance(raw, str):
        return Literal(raw, "string")
    if isinstance(raw, dict):
        if "@id" in raw:
            return Ref(raw["@id"])
        if "@value" in raw:
            dtype = expand(raw.get("@type", "xsd:string"), context)
            if not dtype.startswith(XSD):
                raise LinkedDataError(f"unsupported datatype {dtype!r}")
            local = dtype[len(XSD):]
            value = raw["@value"]
            if local == "decimal" or local in ("float", "double"):
                try:
                    number = Decimal(str(value))
                except InvalidOperation as exc:
                    raise LinkedDataError(f"bad decimal literal {value!r}") from exc
                return Literal(number, "decimal")
            if local == "integer":
                return Literal(int(value), "integer")
            if local == "boolean":
                if isinstance(value, str):
                    value = value == "true"
                return Literal(bool(value), "boolean")
            if local in ("string", "anyURI"):
                return Literal(str(value), local)
            raise LinkedDataError(f"unsupported datatype {dtype!r}")
    raise LinkedDataError(f"unsupported JSON-LD value {raw!r}")


def parse_linked_data(data: bytes | str | dict) -> LinkedDataDoc:
    """Parse the JSON-LD subset produced by :func:`serialize_linked_data`."""
    if isinstance(data, (bytes, str)):
        try:
            data = json.loads(data, parse_float=Decimal)
        except json.JSONDecodeError as exc:
            raise LinkedDataError(f"not JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise LinkedDataError("JSON-LD document must be an object")
    context = data.get("@context", {})
    if not isinstance(context, dict):
        raise LinkedDataError("only inline @context prefix maps are supported")
    raw_nodes = data.get("@graph")
    if raw_nodes is None:
        raw_nodes = [] if set(data) <= {"@context"} else [{k: v for k, v in data.items() if k != "@context"}]
    nodes = []
    for raw in raw_nodes:
        if not isinstance(raw, dict) or "@id" not in raw:
            raise LinkedDataError("every node needs an @id")
        types = raw.get("@type", ())
        if isinstance(types, str):
            types = (types,)
        props = []
        for key, value in raw.items():
            if key in ("@id", "@type"):
                continue
            items = value if isinstance(value, list) else [value]
            for item in items:
                if isinstance(item, Decimal):
                    item = {"@type": "xsd:decimal", "@value": str(item)}
                props.append((key, _parse_literal(item, context)))
        nodes.append(Node(raw["@id"], tuple(types), tuple(props)))
    return LinkedDataDoc(dict(context), tuple(nodes))


# -- N-Triples ---------------------------------------------------------------

def _nt_escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def serialize_ntriples(doc: LinkedDataDoc) -> bytes:
    names = _blank_namer(doc.nodes)
    ctx = dict(doc.context)
    ctx.setdefault("xsd", XSD)

    def term(node_id: str) -> str:
        if node_id in names:
            return names[node_id]
        return f"<{expand(node_id, ctx)}>"

    lines = []
    for n in doc.nodes:
        subject = term(n.id)
        for t in n.types:
            lines.append(f"{subject} <{RDF_TYPE}> <{expand(t, ctx)}> .")
        for key, value in n.properties:
            predicate = f"<{expand(key, ctx)}>"
            if isinstance(value, Ref):
                obj = term(value.id)
            elif value.datatype == "string":
                obj = f'"{_nt_escape(str(value.value))}"'
            else:
                if value.datatype == "boolean":
                    text = str(value.value).lower()
                elif value.datatype == "decimal":
                    text = decimal_lexical(value.value)
                else:
                    text = str(value.value)
                obj = f'"{_nt_escape(text)}"^^<{XSD}{value.datatype}>'
            lines.append(f"{subject} {predicate} {obj} .")
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")

"""CSV to linked-data conversion driven by declarative column bindings.

A mapping spec names, for each CSV column, the vocabulary property it carries
and the datatype to coerce cells to. ``quantity`` columns become blank-node
``qudt:QuantityValue`` objects holding a unit reference and a decimal value.
"""

from __future__ import annotations

import csv
import json
import logging
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from importlib import resources
from pathlib import Path

from .errors import (
    CellTypeError,
    DuplicateColumnBinding,
    MappingError,
    MissingColumn,
    MissingRowToken,
    UndeclaredPrefix,
    UnitWithoutQuantity,
)
from .linkeddata import Literal, LinkedDataDoc, Node, Ref

log = logging.getLogger(__name__)

HPC_NS = "https://github.com/HPC-FAIR/HPC-Ontology#"
QUDT_NS = "http://qudt.org/schema/qudt/"
UNIT_NS = "http://qudt.org/vocab/unit/"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"

BINDING_DATATYPES = ("string", "integer", "decimal", "anyURI", "quantity")

# always available to mapping specs and emitted documents
DEFAULT_PREFIXES = {"hpc": HPC_NS, "qudt": QUDT_NS, "unit": UNIT_NS, "xsd": XSD_NS}


@dataclass(frozen=True)
class VocabTerm:
    name: str
    datatype: str
    description: str
    alias_of: str | None = None


_VOCAB: tuple[tuple[str, str, str], ...] = (
    # GPU profiling properties
    ("hpc:benchmark", "anyURI", "Link to the associated benchmark software ID in ontology"),
    ("hpc:kernelName", "string", "Kernel name"),
    ("hpc:gpuThreadBlockSize", "integer", "Launch block size"),
    ("hpc:registersPerThread", "integer", "Register usage per thread"),
    ("hpc:gpuThreadCount", "integer", "Threads count in launched kernel"),
    ("hpc:gpuWavesPerSM", "integer", "Wave count in SM"),
    ("hpc:maxGPUThreadBlockSizeLimitedByRegister", "integer", "Max block limited by registers"),
    ("hpc:maxGPUThreadBlockSizeLimitedByWarps", "integer", "Max block limited by warps"),
    ("hpc:cpuPageFault", "integer", "CPU page fault count"),
    ("hpc:gpuPageFault", "integer", "GPU page fault count"),
    ("hpc:hostToDeviceTransferSize", "quantity", "Host to Device data transfer size"),
    ("hpc:deviceToHostTransferSize", "quantity", "Device to Host data transfer size"),
    # table-row terms
    ("hpc:TableRow", "class", "One row of a tabular dataset"),
    ("hpc:codeVariant", "string", "Code variant ID"),
    ("hpc:allocatedDataSize", "integer", "Memory allocation size"),
    ("hpc:arrayID", "string", "Internal integer ID of the array"),
    ("hpc:commandLineOption", "string", "Representing data size or input files etc."),
    # decision-tree terms
    ("hpc:DecisionTree", "class", "A decision tree model"),
    ("hpc:DecisionTreeNode", "class", "A node of a decision tree"),
    ("hpc:name", "string", "Name of the decision tree"),
    ("hpc:wasDerivedFrom", "string", "Training dataset the model was derived from"),
    ("hpc:decisionTreeNode", "anyURI", "Link to a node of this decision tree"),
    ("hpc:treeNodeLevel", "integer", "Level from 0"),
    ("hpc:decisionFeature", "string", "Feature for the condition's left operand"),
    ("hpc:relationOp", "string", "Operator for the decision condition"),
    ("hpc:relationValue", "decimal", "Value as the right operand of the decision condition"),
    ("hpc:hasChildNode", "boolean", "Whether this node has children"),
    ("hpc:trueNode", "anyURI", "Node reached when the condition holds"),
    ("hpc:falseNode", "anyURI", "Node reached when the condition fails"),
    ("hpc:decisionLabel", "string", "Decision label of a leaf node"),
    # extension terms used by the bundled XPlacer mapping specs
    ("hpc:benchmarkName", "string", "Benchmark software name"),
    ("hpc:arrayName", "string", "Name of the array"),
    ("hpc:bestCodeVariant", "string", "The best performing code variant ID"),
    ("hpc:allocationBeginAddress", "string", "Beginning address of memory allocation"),
    ("hpc:allocationEndAddress", "string", "Ending address of memory allocation"),
    ("hpc:elapsedCycles", "integer", "Cycle count of profiled code"),
    ("hpc:totalExecutionTime", "decimal", "Total execution time for this kernel"),
    ("hpc:numberOfCalls", "integer", "Number of calls to this kernel"),
    ("hpc:averageExecutionTime", "quantity", "Average kernel execution time"),
    ("hpc:minExecutionTime", "decimal", "Minimal kernel execution time"),
    ("hpc:maxExecutionTime", "decimal", "Maximal kernel execution time"),
    ("hpc:executionTimePercentage", "decimal", "Percentage of time spent in this kernel"),
    ("hpc:memoryThroughputRate", "decimal", "GPU memory throughput"),
    ("hpc:dramUtilization", "decimal", "DRAM utilization"),
    ("hpc:smThroughput", "decimal", "SM throughput"),
    ("hpc:l1TexCacheUtilization", "decimal", "L1/Tex cache utilization"),
    ("hpc:l2CacheUtilization", "decimal", "L2 cache utilization"),
    ("hpc:achievedOccupancy", "decimal", "Achieved profiled occupancy"),
    ("hpc:achievedActiveWarpsPerSM", "decimal", "Profiled active warps per SM"),
    ("hpc:dramFrequency", "decimal", "Frequency of DRAM"),
    ("hpc:streamingMultiprocessorFrequency", "decimal", "Frequency of Streaming multiprocessor"),
    ("hpc:smActiveCycles", "decimal", "Active cycle counts from SM"),
    ("hpc:theoreticalActiveWarpsPerSM", "decimal", "Theoretical Active Warps per SM"),
    ("hpc:theoreticalOccupancy", "decimal", "Theoretical Occupancy"),
    ("hpc:maxGPUThreadBlockSizeLimitedBySM", "integer", "Max block limited by SM"),
    ("hpc:maxGPUThreadBlockSizeLimitedBySharedMemory", "integer", "Max block limited by shared memory"),
    ("hpc:gpuGridSize", "integer", "Launch grid size"),
    ("hpc:sharedMemoryConfigurationSize", "decimal", "Launch shared memory configuration size"),
    ("hpc:staticSharedMemoryPerBlock", "decimal", "Launch static shared memory"),
    ("hpc:unifiedMemoryRemoteMap", "string", "Unified memory remote map"),
)

_ALIASES = {"hpc:kenelName": "hpc:kernelName"}


def builtin_vocab() -> list[VocabTerm]:
    terms = [VocabTerm(name, dtype, desc) for name, dtype, desc in _VOCAB]
    by_name = {t.name: t for t in terms}
    for alias, target in _ALIASES.items():
        t = by_name[target]
        terms.append(VocabTerm(alias, t.datatype, t.description, alias_of=target))
    return terms


def vocab_lookup(name: str) -> VocabTerm | None:
    for term in builtin_vocab():
        if term.name == name:
            return term
    return None


def canonical_property(name: str) -> str:
    """Map deprecated spellings onto their registered term."""
    return _ALIASES.get(name, name)


# -- mapping specs -------------------------------------------------------------

@dataclass(frozen=True)
class ColumnBinding:
    column: str
    property: str
    datatype: str
    unit: str | None = None


@dataclass(frozen=True)
class MappingSpec:
    base_iri: str
    id_template: str
    bindings: tuple[ColumnBinding, ...]
    row_type: str = "hpc:TableRow"
    prefixes: dict[str, str] = field(default_factory=dict)

    def row_iri(self, row: int) -> str:
        return self.base_iri + self.id_template.replace("{row}", str(row))

    @property
    def context(self) -> dict[str, str]:
        ctx = dict(DEFAULT_PREFIXES)
        ctx.update(self.prefixes)
        return ctx


_CURIE = re.compile(r"^([A-Za-z][\w.-]*):(.*)$")


def _check_prefix(name: str, prefixes: dict[str, str], what: str) -> None:
    if "://" in name:
        return
    m = _CURIE.match(name)
    if not m:
        raise UndeclaredPrefix(f"{what} {name!r} is neither a prefixed name nor an absolute IRI")
    if m.group(1) not in prefixes:
        raise UndeclaredPrefix(f"{what} {name!r} uses undeclared prefix {m.group(1)!r}")


def build_mapping(doc: dict) -> MappingSpec:
    """Validate a decoded mapping document and return the spec."""
    if not isinstance(doc, dict):
        raise MappingError("mapping spec must be an object")
    for key in ("base_iri", "id_template", "bindings"):
        if key not in doc:
            raise MappingError(f"mapping spec lacks {key!r}")
    prefixes = dict(DEFAULT_PREFIXES)
    prefixes.update(doc.get("prefixes") or {})
    id_template = doc["id_template"]
    if id_template.count("{row}") != 1:
        raise MissingRowToken(f"id_template {id_template!r} must contain {{row}} exactly once")
    row_type = doc.get("row_type", "hpc:TableRow")
    _check_prefix(row_type, prefixes, "row_type")

    bindings = []
    seen: set[str] = set()
    for raw in doc["bindings"]:
        column = raw.get("column")
        prop = raw.get("property")
        dtype = raw.get("datatype", "string")
        unit = raw.get("unit")
        if not column or not prop:
            raise MappingError(f"binding {raw!r} needs column and property")
        if column in seen:
            raise DuplicateColumnBinding(f"column {column!r} is bound twice")
        seen.add(column)
        if dtype not in BINDING_DATATYPES:
            raise MappingError(f"column {column!r}: unknown datatype {dtype!r}")
        if dtype == "quantity" and not unit:
            raise UnitWithoutQuantity(f"column {column!r}: quantity binding needs a unit")
        if unit and dtype != "quantity":
            raise UnitWithoutQuantity(f"column {column!r}: unit given for non-quantity datatype {dtype!r}")
        prop = canonical_property(prop)
        _check_prefix(prop, prefixes, "property")
        if unit:
            _check_prefix(unit, prefixes, "unit")
        if prop.startswith("hpc:") and vocab_lookup(prop) is None:
            log.warning("property %s is not in the built-in vocabulary", prop)
        bindings.append(ColumnBinding(column, prop, dtype, unit))

    return MappingSpec(
        base_iri=doc["base_iri"],
        id_template=id_template,
        bindings=tuple(bindings),
        row_type=row_type,
        prefixes=dict(doc.get("prefixes") or {}),
    )


def parse_mapping(path) -> MappingSpec:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MappingError(f"{path}: not valid JSON: {exc}") from exc
    return build_mapping(doc)


def bundled_mapping(name: str) -> Path:
    """Path of a mapping spec shipped with the package (e.g. ``uvm-row``)."""
    ref = resources.files("fairgauge") / "data" / "mappings" / f"{name}.json"
    return Path(str(ref))


# -- conversion ----------------------------------------------------------------

def _coerce(text: str, dtype: str, row: int, column: str):
    stripped = text.strip()
    if dtype == "string":
        return Literal(text, "string")
    if dtype == "integer":
        if not re.fullmatch(r"[+-]?\d+", stripped):
            raise CellTypeError(row, column, text, dtype)
        return Literal(int(stripped), "integer")
    if dtype == "anyURI":
        if any(c.isspace() for c in stripped):
            raise CellTypeError(row, column, text, dtype)
        return Literal(stripped, "anyURI")
    # decimal and quantity
    try:
        value = Decimal(stripped)
    except InvalidOperation:
        raise CellTypeError(row, column, text, dtype) from None
    if not value.is_finite():
        raise CellTypeError(row, column, text, dtype)
    return Literal(value, "decimal")


def annotate_rows(header: list[str], rows, mapping: MappingSpec) -> LinkedDataDoc:
    """Convert already-split CSV rows (header excluded) into a document."""
    missing = [b.column for b in mapping.bindings if b.column not in header]
    if missing:
        raise MissingColumn(f"column {missing[0]!r} not found in CSV header")
    index = {b.column: header.index(b.column) for b in mapping.bindings}

    nodes: list[Node] = []
    blank = 0
    for row_no, cells in enumerate(rows, start=1):
        props = []
        extra = []
        for b in mapping.bindings:
            i = index[b.column]
            text = cells[i] if i < len(cells) else ""
            if text.strip() == "":
                continue
            value = _coerce(text, b.datatype, row_no, b.column)
            if b.datatype == "quantity":
                qid = f"_:q{blank}"
                blank += 1
                extra.append(
                    Node(
                        qid,
                        ("qudt:QuantityValue",),
                        (("qudt:unit", Ref(b.unit)), ("qudt:value", value)),
                    )
                )
                props.append((b.property, Ref(qid)))
            else:
                props.append((b.property, value))
        nodes.append(Node(mapping.row_iri(row_no), (mapping.row_type,), tuple(props)))
        nodes.extend(extra)
    return LinkedDataDoc(mapping.context, tuple(nodes))


def annotate_csv(csv_path, mapping: MappingSpec) -> LinkedDataDoc:
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumn(f"{csv_path}: CSV has no header row") from None
        return annotate_rows(header, list(reader), mapping)

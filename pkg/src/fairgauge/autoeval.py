"""The 17 automated FAIR metric tests.

Every rule is a pure function of ``(graph, target, config)`` and reports the
canonical keys it consulted. Nothing here raises on odd input: a rule that
cannot decide returns Fail or NotApplicable with evidence.
"""

from __future__ import annotations

import enum
import hashlib
import json
import os
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Callable
from urllib.parse import urlparse

from .errors import FairGaugeError
from .harvest import (
    PAV,
    PROV,
    AssessmentTarget,
    MetadataGraph,
    classify_identifier,
    metadata_scheme,
    strip_scheme,
)
from .registry import builtin_registry

CONFIG_ENV = "FAIRGAUGE_CONFIG"


class MetricStatus(str, enum.Enum):
    PASS = "Pass"
    PARTIAL = "Partial"
    FAIL = "Fail"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class EvalConfig:
    core_elements: tuple[str, ...]
    core_partial_threshold: int
    trusted_repositories: frozenset[str]
    known_semantic_resources: frozenset[str]
    license_registry: frozenset[str]
    community_standards: frozenset[str]
    open_formats: frozenset[str]
    pid_patterns: tuple[tuple[str, str], ...] = ()
    digest: str = ""
    source: str = "<builtin>"

    @classmethod
    def from_mapping(cls, data: dict, *, base: dict | None = None, source: str = "<mapping>") -> "EvalConfig":
        """Build from a key -> list-of-strings document; missing keys fall back to ``base``."""
        merged = dict(base or {})
        for key, value in data.items():
            if key not in _CONFIG_KEYS:
                raise FairGaugeError(f"{source}: unknown config key {key!r}")
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise FairGaugeError(f"{source}: {key} must be a list of strings")
            merged[key] = value
        missing = [k for k in _CONFIG_KEYS if k not in merged]
        if missing:
            raise FairGaugeError(f"{source}: missing config keys {missing}")
        canonical = json.dumps(merged, sort_keys=True, separators=(",", ":")).encode()
        patterns = []
        for entry in merged["pid_patterns"]:
            name, sep, regex = entry.partition("=")
            if not sep or not name or not regex:
                raise FairGaugeError(f"{source}: pid pattern {entry!r} is not name=regex")
            try:
                re.compile(regex)
            except re.error as exc:
                raise FairGaugeError(f"{source}: bad pid pattern {entry!r}: {exc}") from exc
            patterns.append((name, regex))
        try:
            threshold = int(merged["core_partial_threshold"][0])
        except (IndexError, ValueError) as exc:
            raise FairGaugeError(f"{source}: core_partial_threshold must hold one integer") from exc
        return cls(
            core_elements=tuple(merged["core_elements"]),
            core_partial_threshold=threshold,
            trusted_repositories=frozenset(s.lower() for s in merged["trusted_repositories"]),
            known_semantic_resources=frozenset(merged["known_semantic_resources"]),
            license_registry=frozenset(merged["license_registry"]),
            community_standards=frozenset(s.lower() for s in merged["community_standards"]),
            open_formats=frozenset(s.lower() for s in merged["open_formats"]),
            pid_patterns=tuple(patterns),
            digest=hashlib.sha256(canonical).hexdigest(),
            source=source,
        )


_CONFIG_KEYS = (
    "core_elements",
    "core_partial_threshold",
    "trusted_repositories",
    "known_semantic_resources",
    "license_registry",
    "community_standards",
    "open_formats",
    "pid_patterns",
)


def _default_data() -> dict:
    text = resources.files("fairgauge").joinpath("data/eval_config.json").read_text(encoding="utf-8")
    return json.loads(text)


def default_config() -> EvalConfig:
    return EvalConfig.from_mapping(_default_data(), source="<builtin>")


def load_config(path: str | os.PathLike | None = None) -> EvalConfig:
    """Load an EvalConfig file layered over the defaults.

    With no path, ``$FAIRGAUGE_CONFIG`` is used if set, else the defaults.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is None:
        return default_config()
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise FairGaugeError(f"cannot read config {p}: {exc}") from exc
    if not isinstance(data, dict):
        raise FairGaugeError(f"{p}: config must be a JSON object")
    return EvalConfig.from_mapping(data, base=_default_data(), source=str(p))


@dataclass(frozen=True)
class MetricResult:
    metric_id: str
    status: MetricStatus
    evidence: tuple[str, ...] = ()
    checked_keys: tuple[str, ...] = ()

    def __post_init__(self):
        if self.metric_id not in builtin_registry().automated_ids:
            raise ValueError(f"{self.metric_id} is not an automated metric")


@dataclass(frozen=True)
class AutoReport:
    results: dict[str, MetricResult]
    target_identifier: str
    harvested_at: str
    config_digest: str = ""

    def __post_init__(self):
        expected = set(builtin_registry().automated_ids)
        if set(self.results) != expected:
            raise ValueError("auto report must hold exactly the automated metrics")

    def status(self, metric_id: str) -> MetricStatus:
        return self.results[metric_id].status

    def to_dict(self) -> dict:
        return {
            "target": self.target_identifier,
            "harvested_at": self.harvested_at,
            "config_digest": self.config_digest,
            "results": [
                {
                    "metric": r.metric_id,
                    "status": r.status.value,
                    "evidence": list(r.evidence),
                    "checked_keys": list(r.checked_keys),
                }
                for r in self.results.values()
            ],
        }


# -- helpers -------------------------------------------------------------------

Rule = Callable[[MetadataGraph, AssessmentTarget, EvalConfig], tuple[MetricStatus, list[str]]]
RULES: dict[str, tuple[tuple[str, ...], Rule]] = {}

P, PT, F, NA = MetricStatus.PASS, MetricStatus.PARTIAL, MetricStatus.FAIL, MetricStatus.NOT_APPLICABLE
STANDARD_SCHEMES = {"https", "http", "ftp"}
FORMAL_METADATA = {"json-ld", "turtle", "rdf-xml", "dc-xml"}
KR_LANGUAGES = {"json-ld", "turtle", "rdf-xml"}
ACCESS_LEVELS = {
    "open": "open", "public": "open", "openaccess": "open", "free": "open", "true": "open",
    "embargoed": "embargoed", "embargo": "embargoed", "embargoedaccess": "embargoed",
    "restricted": "restricted", "restrictedaccess": "restricted", "false": "restricted",
    "closed": "closed", "closedaccess": "closed", "metadataonly": "closed",
}


def rule(metric_id: str, *keys: str):
    def register(fn: Rule) -> Rule:
        RULES[metric_id] = (keys, fn)
        return fn
    return register


def _files(graph: MetadataGraph, target: AssessmentTarget):
    return target.data_files or graph.data_files


def _scheme(locator: str) -> str | None:
    parsed = urlparse(locator)
    if len(parsed.scheme) <= 1:  # bare or drive-letter path
        return None
    return parsed.scheme.lower()


def normalize_access(value: str) -> str | None:
    text = value.strip().lower()
    m = re.search(r"info:eu-repo/semantics/(\w+)", text)
    if m:
        text = m.group(1)
    text = text.rsplit("/", 1)[-1].rsplit("#", 1)[-1]
    return ACCESS_LEVELS.get(re.sub(r"[\s_-]", "", text))


_LICENSE_URL = [
    (re.compile(r"creativecommons\.org/publicdomain/zero/1\.0"), lambda m: "CC0-1.0"),
    (re.compile(r"creativecommons\.org/licenses/([a-z-]+)/(\d\.\d)"),
     lambda m: f"CC-{m.group(1).upper()}-{m.group(2)}"),
    (re.compile(r"spdx\.org/licenses/([\w.+-]+?)(?:\.html|\.json)?/?$"), lambda m: m.group(1)),
    (re.compile(r"opensource\.org/licenses?/([\w.+-]+?)/?$"), lambda m: m.group(1)),
]
_LICENSE_NAMES = {
    "creative commons attribution 4.0 international": "CC-BY-4.0",
    "creative commons attribution 4.0": "CC-BY-4.0",
    "cc by 4.0": "CC-BY-4.0",
    "creative commons zero v1.0 universal": "CC0-1.0",
    "mit license": "MIT",
    "apache license 2.0": "Apache-2.0",
    "apache license, version 2.0": "Apache-2.0",
}


def resolve_license(value: str, registry: frozenset[str]) -> str | None:
    """Map a license string or IRI to an id in ``registry``."""
    text = value.strip()
    folded = {lic.lower(): lic for lic in registry}
    candidates = [text]
    low = strip_scheme(text.lower())
    for pattern, build in _LICENSE_URL:
        m = pattern.search(low)
        if m:
            candidates.append(build(m))
    if text.lower() in _LICENSE_NAMES:
        candidates.append(_LICENSE_NAMES[text.lower()])
    for c in candidates:
        c = c.replace(" ", "-")
        if c.lower() in folded:
            return folded[c.lower()]
    return None


# -- rules ---------------------------------------------------------------------

@rule("FsF-F1-01D", "identifier")
def _f1_01d(graph, target, config):
    c = classify_identifier(target.identifier, config.pid_patterns)
    if c.globally_unique:
        return P, [f"identifier {target.identifier!r} is a globally unique {c.scheme}"]
    return F, [f"identifier {target.identifier!r} matches no known identifier scheme"]


@rule("FsF-F1-02D", "identifier")
def _f1_02d(graph, target, config):
    c = classify_identifier(target.identifier, config.pid_patterns)
    if c.persistent:
        return P, [f"identifier uses persistent scheme {c.scheme}"]
    return F, [f"identifier scheme {c.scheme} is not persistent; no persistent identifier found"]


@rule("FsF-F2-01M", "identifier", "title", "creator", "publisher",
      "publication_date", "resource_type", "description", "keywords")
def _f2_01m(graph, target, config):
    present = [k for k in config.core_elements if graph.has(k)]
    missing = [k for k in config.core_elements if k not in present]
    evidence = [f"{len(present)}/{len(config.core_elements)} core elements present"]
    if missing:
        evidence.append("missing: " + ", ".join(missing))
    if not missing:
        return P, evidence
    if len(present) >= config.core_partial_threshold:
        return PT, evidence
    return F, evidence


@rule("FsF-F3-01M", "file.locator", "identifier")
def _f3_01m(graph, target, config):
    if graph.has("file.locator"):
        return P, [f"{len(graph.values('file.locator'))} data locator(s) in metadata"]
    # a content identifier other than the dataset's own
    for value in graph.values("identifier"):
        if value != target.identifier and classify_identifier(value, config.pid_patterns).persistent:
            return P, [f"content identifier {value} in metadata"]
    return F, ["metadata does not include data file locators or content identifiers"]


@rule("FsF-F4-01M")
def _f4_01m(graph, target, config):
    found = sorted(graph.formats & FORMAL_METADATA)
    if found:
        return P, ["machine-harvestable metadata: " + ", ".join(found)]
    return F, ["no structured metadata (embedded block, sidecar or registry record) found"]


@rule("FsF-A1-01M", "access_level")
def _a1_01m(graph, target, config):
    values = graph.values("access_level")
    for v in values:
        level = normalize_access(v)
        if level:
            return P, [f"access level {level} ({v!r})"]
    if values:
        return F, [f"access level {values[0]!r} is not recognized"]
    return F, ["access level not specified"]


@rule("FsF-A1-02M")
def _a1_02m(graph, target, config):
    scheme = metadata_scheme(target)
    if target.kind == "fixture-dir":
        if scheme:
            return P, ["landing page available through a standard protocol"]
        return F, ["fixture has no landing page"]
    if scheme in STANDARD_SCHEMES:
        return P, [f"metadata served over {scheme}"]
    return F, [f"metadata location scheme {scheme!r} is not a standard protocol"]


@rule("FsF-A1-03D", "file.locator")
def _a1_03d(graph, target, config):
    files = _files(graph, target)
    if not files:
        return NA, ["no data files known"]
    bad = [f.locator for f in files if (_scheme(f.locator) or "file") not in STANDARD_SCHEMES | {"file"}]
    if bad:
        return F, ["nonstandard access protocol: " + ", ".join(bad)]
    return P, [f"all {len(files)} data file(s) accessible through standard protocols"]


@rule("FsF-A2-01M", "preservation_policy", "publisher")
def _a2_01m(graph, target, config):
    if graph.has("preservation_policy"):
        return P, ["preservation policy stated"]
    names = graph.values("publisher") + ([target.publisher_hint] if target.publisher_hint else [])
    for name in names:
        if name.strip().lower() in config.trusted_repositories:
            return P, [f"published by trusted repository {name}"]
    return F, ["no preservation policy and publisher is not a trusted repository"]


@rule("FsF-I1-01M")
def _i1_01m(graph, target, config):
    found = sorted(graph.formats & KR_LANGUAGES)
    if found:
        return P, ["formal knowledge representation: " + ", ".join(found)]
    return F, ["metadata is not expressed in a formal knowledge representation language"]


@rule("FsF-I1-02M")
def _i1_02m(graph, target, config):
    found = sorted(graph.namespaces & config.known_semantic_resources)
    if found:
        return P, ["semantic resources: " + ", ".join(found)]
    return F, ["no namespaces of known semantic resources in metadata"]


@rule("FsF-I3-01M", "related")
def _i3_01m(graph, target, config):
    related = graph.values("related")
    if related:
        return P, [f"{len(related)} related resource(s): " + ", ".join(related[:3])]
    return F, ["no references to related resources"]


@rule("FsF-R1-01MD", "file.locator", "file.size", "file.media_type", "file.checksum", "description")
def _r1_01md(graph, target, config):
    files = _files(graph, target)
    if not files:
        return F, ["no data files described"]
    evidence = []
    no_size = [f.locator for f in files if f.declared_size is None]
    no_type = [f.locator for f in files if not f.media_type]
    no_sum = [f.locator for f in files if f.checksum is None]
    for label, missing in (("size", no_size), ("media type", no_type), ("checksum", no_sum)):
        if missing:
            evidence.append(f"{label} missing for {len(missing)} file(s)")
    has_description = graph.has("description")
    if not has_description:
        evidence.append("no dataset-level description")
    if not (no_size or no_type or no_sum) and has_description:
        return P, [f"technical properties complete for {len(files)} file(s)"]
    if not no_type:
        return PT, evidence
    return F, evidence


@rule("FsF-R1.1-01M", "license")
def _r1_1_01m(graph, target, config):
    licenses = graph.values("license")
    for lic in licenses:
        resolved = resolve_license(lic, config.license_registry)
        if resolved:
            return P, [f"license {resolved} ({lic})"]
    if licenses:
        return PT, [f"license {licenses[0]!r} not found in the license registry"]
    return F, ["license information is missing"]


@rule("FsF-R1.2-01M", "creator", "publication_date", "publisher", "provenance.*")
def _r1_2_01m(graph, target, config):
    formal = sorted(ns for ns in graph.namespaces if strip_scheme(ns) in (strip_scheme(PROV), strip_scheme(PAV)))
    prov_keys = sorted({k for k in graph.keys() if k.startswith("provenance.")})
    if formal:
        return P, ["formal provenance vocabulary: " + ", ".join(formal)]
    basic = [k for k in ("creator", "publication_date", "publisher") if graph.has(k)]
    if basic or prov_keys:
        return PT, ["basic provenance only: " + ", ".join(basic + prov_keys)]
    return F, ["provenance information is missing"]


@rule("FsF-R1.3-01M", "schema_id")
def _r1_3_01m(graph, target, config):
    found = sorted(graph.schema_ids & config.community_standards)
    if found:
        return P, ["community metadata standard: " + ", ".join(found)]
    seen = sorted(graph.schema_ids)
    return F, ["no community-specific metadata standard" + (f" (found {', '.join(seen)})" if seen else "")]


@rule("FsF-R1.3-02D", "file.media_type")
def _r1_3_02d(graph, target, config):
    files = _files(graph, target)
    if not files:
        return NA, ["no data files known"]
    closed = []
    for f in files:
        labels = {x.lower() for x in (f.format_label, f.media_type) if x}
        if not labels & config.open_formats:
            closed.append(f"{f.locator} ({f.media_type or 'unknown format'})")
    if closed:
        return F, ["not in an open format: " + ", ".join(closed)]
    return P, [f"all {len(files)} data file(s) use open formats"]


# -- driver --------------------------------------------------------------------

def _timestamp(target: AssessmentTarget) -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch and epoch.isdigit():
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    elif target.kind != "live-url" and target.location and Path(target.location).exists():
        root = Path(target.location)
        paths = [root] + (sorted(root.rglob("*")) if root.is_dir() else [])
        moment = datetime.fromtimestamp(int(max(p.stat().st_mtime for p in paths)), tz=timezone.utc)
    else:
        moment = datetime.now(timezone.utc).replace(microsecond=0)
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def evaluate_metrics(
    graph: MetadataGraph,
    target: AssessmentTarget,
    config: EvalConfig | None = None,
    *,
    harvested_at: str | None = None,
) -> AutoReport:
    config = config or default_config()
    results: dict[str, MetricResult] = {}
    for metric_id in builtin_registry().automated_ids:
        keys, fn = RULES[metric_id]
        status, evidence = fn(graph, target, config)
        results[metric_id] = MetricResult(metric_id, status, tuple(evidence), keys)
    return AutoReport(
        results=results,
        target_identifier=target.identifier,
        harvested_at=harvested_at or _timestamp(target),
        config_digest=config.digest,
    )

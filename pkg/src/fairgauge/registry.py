"""Consolidated registry of the 47 scoring FAIRness indicators.

Rows combine the RDA maturity indicators with the FsF automated metrics. Where
both describe the same evaluation they are stored as one *dual* indicator
whose id is the RDA id and whose ``dual_partner`` is the FsF metric id.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .errors import UnknownIndicator

LETTERS = ("F", "A", "I", "R")

SUB_PRINCIPLES = (
    "F1", "F2", "F3", "F4",
    "A1", "A1.1", "A1.2", "A2",
    "I1", "I2", "I3",
    "R1", "R1.1", "R1.2", "R1.3",
)

ID_PATTERN = re.compile(r"^(RDA|FsF)-([FAIR]\d(?:\.\d)?)-(\d{2})(MD|M|D)$")


class Mode(str, enum.Enum):
    MANUAL_ONLY = "ManualOnly"
    AUTOMATED_ONLY = "AutomatedOnly"
    DUAL = "Dual"


@dataclass(frozen=True)
class PrincipleId:
    letter: str
    sub: str

    def __post_init__(self):
        if self.sub not in SUB_PRINCIPLES:
            raise ValueError(f"unknown sub-principle {self.sub!r}")
        if self.letter != self.sub[0]:
            raise ValueError(f"letter {self.letter!r} does not match {self.sub!r}")

    @classmethod
    def of(cls, sub: str) -> "PrincipleId":
        return cls(sub[0], sub)

    def __str__(self) -> str:
        return self.sub


@dataclass(frozen=True)
class Indicator:
    id: str
    source: str
    principle: PrincipleId
    target: str
    description: str
    mode: Mode
    dual_partner: str | None = None

    @property
    def ids(self) -> tuple[str, ...]:
        return (self.id, self.dual_partner) if self.dual_partner else (self.id,)

    @property
    def metric_id(self) -> str | None:
        """The automated metric id deciding this indicator, if any."""
        if self.mode is Mode.DUAL:
            return self.dual_partner
        if self.mode is Mode.AUTOMATED_ONLY:
            return self.id
        return None

    @property
    def label(self) -> str:
        return " / ".join(self.ids)


def parse_id(indicator_id: str) -> tuple[str, str, str, str]:
    """Split an id into (source, principle, number, target suffix)."""
    m = ID_PATTERN.match(indicator_id)
    if not m:
        raise ValueError(f"malformed indicator id {indicator_id!r}")
    return m.group(1), m.group(2), m.group(3), m.group(4)


@dataclass(frozen=True)
class Registry:
    indicators: tuple[Indicator, ...]
    version: str

    def __iter__(self) -> Iterator[Indicator]:
        return iter(self.indicators)

    def __len__(self) -> int:
        return len(self.indicators)

    def lookup(self, indicator_id: str) -> Indicator:
        return lookup(self, indicator_id)

    def by_mode(self, mode: Mode) -> tuple[Indicator, ...]:
        return tuple(i for i in self.indicators if i.mode is mode)

    def by_letter(self, letter: str) -> tuple[Indicator, ...]:
        return tuple(i for i in self.indicators if i.principle.letter == letter)

    @property
    def automated_ids(self) -> tuple[str, ...]:
        """The FsF metric ids, in table order."""
        return tuple(i.metric_id for i in self.indicators if i.metric_id)

    @property
    def manual_ids(self) -> tuple[str, ...]:
        return tuple(i.id for i in self.by_mode(Mode.MANUAL_ONLY))

    def maxima(self) -> dict[str, int]:
        return {letter: len(self.by_letter(letter)) for letter in LETTERS}

    def validate(self) -> None:
        """Check the structural invariants; raises AssertionError on violation."""
        seen: set[str] = set()
        for ind in self.indicators:
            for i in ind.ids:
                assert i not in seen, f"duplicate id {i}"
                seen.add(i)
            source, principle, _, suffix = parse_id(ind.id)
            assert source == ind.source and principle == ind.principle.sub
            assert suffix == ind.target, ind.id
            if ind.mode is Mode.DUAL:
                assert ind.source == "RDA" and ind.dual_partner is not None
                p_source, p_principle, _, p_suffix = parse_id(ind.dual_partner)
                assert p_source == "FsF" and p_principle == principle, ind.id
            else:
                assert ind.dual_partner is None, ind.id
                expected = "FsF" if ind.mode is Mode.AUTOMATED_ONLY else "RDA"
                assert ind.source == expected, ind.id


def lookup(registry: Registry, indicator_id: str) -> Indicator:
    """Resolve an RDA id, FsF id or dual partner id to its scoring indicator."""
    for ind in registry.indicators:
        if indicator_id == ind.id or indicator_id == ind.dual_partner:
            return ind
    raise UnknownIndicator(f"unknown indicator {indicator_id!r}")


def partner_of(registry: Registry, indicator_id: str) -> str | None:
    """Return the other id of a dual pair, or None for single-id indicators."""
    ind = lookup(registry, indicator_id)
    if ind.dual_partner is None:
        return None
    return ind.dual_partner if indicator_id == ind.id else ind.id


# (sub-principle, id, description, dual partner or None); FsF ids without a
# partner are automated-only, RDA ids without a partner are manual-only.
_TABLE: tuple[tuple[str, str, str, str | None], ...] = (
    ("F1", "RDA-F1-01M", "Metadata is identified by a persistent identifier", None),
    ("F1", "RDA-F1-01D", "Data is identified by a persistent identifier", "FsF-F1-02D"),
    ("F1", "RDA-F1-02M", "Metadata is identified by a globally unique identifier", None),
    ("F1", "RDA-F1-02D", "Data is identified by a globally unique identifier", "FsF-F1-01D"),
    ("F2", "RDA-F2-01M", "Rich metadata is provided to allow discovery", None),
    ("F2", "FsF-F2-01M", "Metadata includes descriptive core elements to support data findability", None),
    ("F3", "RDA-F3-01M", "Metadata includes the identifier for the data", "FsF-F3-01M"),
    ("F4", "RDA-F4-01M", "Metadata is offered in such a way that it can be harvested and indexed", "FsF-F4-01M"),
    ("A1", "RDA-A1-01M", "Metadata contains information to enable the user to get access to the data", None),
    ("A1", "RDA-A1-02M", "Metadata can be accessed manually", None),
    ("A1", "RDA-A1-02D", "Data can be accessed manually", None),
    ("A1", "RDA-A1-03M", "Metadata identifier resolves to a metadata record or digital object", None),
    ("A1", "RDA-A1-03D", "Data identifier resolves to a metadata record or digital object", None),
    ("A1", "RDA-A1-04M", "Metadata is accessed through standardised protocol", "FsF-A1-02M"),
    ("A1", "RDA-A1-04D", "Data is accessed through standardized protocol", "FsF-A1-03D"),
    ("A1", "RDA-A1-05D", "Data can be accessed automatically", None),
    ("A1", "FsF-A1-01M", "Metadata contains access level and access conditions of the data", None),
    ("A1.1", "RDA-A1.1-01M", "Metadata is accessible through a free access protocol", None),
    ("A1.1", "RDA-A1.1-01D", "Data is accessible through a free access protocol", None),
    ("A1.2", "RDA-A1.2-01D", "Data is accessible through an access protocol that supports authentication and authorization", None),
    ("A2", "RDA-A2-01M", "Metadata is guaranteed to remain available after data is no longer available", "FsF-A2-01M"),
    ("I1", "RDA-I1-01M", "Metadata uses knowledge representation expressed in standardized format", None),
    ("I1", "RDA-I1-01D", "Data uses knowledge representation expressed in standardized format", None),
    ("I1", "RDA-I1-02M", "Metadata uses machine-understandable knowledge representation", None),
    ("I1", "RDA-I1-02D", "Data uses machine-understandable knowledge representation", None),
    ("I1", "FsF-I1-01M", "Metadata is represented using a formal knowledge representation language", None),
    ("I1", "FsF-I1-02M", "Metadata uses semantic resources", None),
    ("I2", "RDA-I2-01M", "Metadata uses FAIR-compliant vocabularies", None),
    ("I2", "RDA-I2-01D", "Data uses FAIR-compliant vocabularies", None),
    ("I3", "RDA-I3-01M", "Metadata includes references to other (meta)data", "FsF-I3-01M"),
    ("I3", "RDA-I3-01D", "Data includes references to other (meta)data", None),
    ("I3", "RDA-I3-02M", "Metadata includes references to other data", None),
    ("I3", "RDA-I3-02D", "Data includes references to other data", None),
    ("I3", "RDA-I3-03M", "Metadata includes qualified references to other metadata", None),
    ("I3", "RDA-I3-04M", "Metadata include qualified references to other data", None),
    ("R1", "RDA-R1-01M", "Plurality of accurate and relevant attributes are provided to allow reuse", None),
    ("R1", "FsF-R1-01MD", "Metadata specifies the content of the data", None),
    ("R1.1", "RDA-R1.1-01M", "Metadata includes information about the license under which the data can be reused", None),
    ("R1.1", "RDA-R1.1-02M", "Metadata refers to a standard reuse license", None),
    ("R1.1", "RDA-R1.1-03M", "Metadata refers to a machine-understandable reuse license", "FsF-R1.1-01M"),
    ("R1.2", "RDA-R1.2-01M", "Metadata includes provenance information according to community-specific standards", None),
    ("R1.2", "RDA-R1.2-02M", "Metadata includes provenance information according to a cross-community language", None),
    ("R1.2", "FsF-R1.2-01M", "Metadata includes provenance information about data creation or generation", None),
    ("R1.3", "RDA-R1.3-01M", "Metadata complies with a community standard", "FsF-R1.3-01M"),
    ("R1.3", "RDA-R1.3-01D", "Data complies with a community standard", None),
    ("R1.3", "RDA-R1.3-02M", "Metadata is expressed in compliance with a machine-understandable community standard", None),
    ("R1.3", "RDA-R1.3-02D", "Data is in compliance with a machine-understandable community standard", "FsF-R1.3-02D"),
)

REGISTRY_VERSION = "rda-fsf-47-v1"


def _build(row: tuple[str, str, str, str | None]) -> Indicator:
    sub, indicator_id, description, partner = row
    source, _, _, suffix = parse_id(indicator_id)
    if partner:
        mode = Mode.DUAL
    elif source == "FsF":
        mode = Mode.AUTOMATED_ONLY
    else:
        mode = Mode.MANUAL_ONLY
    return Indicator(
        id=indicator_id,
        source=source,
        principle=PrincipleId.of(sub),
        target=suffix,
        description=description,
        mode=mode,
        dual_partner=partner,
    )


@lru_cache(maxsize=None)
def builtin_registry() -> Registry:
    registry = Registry(tuple(_build(row) for row in _TABLE), REGISTRY_VERSION)
    registry.validate()
    return registry

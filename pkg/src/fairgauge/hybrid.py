"""Merge manual answers and automated verdicts into points and a FAIR score."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .autoeval import AutoReport, MetricStatus
from .errors import (
    IncompleteOutcomes,
    OverrideError,
    OverrideOnManualIndicator,
    OverrideWithoutJustification,
)
from .manual import AnswerSet, MaturityLevel
from .registry import LETTERS, Mode, Registry, builtin_registry, lookup

log = logging.getLogger(__name__)

AUTOMATED, MANUAL, OVERRIDE = "Automated", "Manual", "Override"


@dataclass(frozen=True)
class Override:
    metric_id: str
    decided: MetricStatus  # Pass or Fail
    justification: str

    def __post_init__(self):
        if self.decided not in (MetricStatus.PASS, MetricStatus.FAIL):
            raise OverrideError(f"override decision must be pass or fail, not {self.decided.value}")
        if not self.justification or not self.justification.strip():
            raise OverrideWithoutJustification(f"override of {self.metric_id} needs a justification")

    def render(self) -> str:
        return f"{self.metric_id}={self.decided.value.lower()}: {self.justification}"


_OVERRIDE = re.compile(r"^\s*([\w.-]+)\s*=\s*(\w+)\s*(?::(.*))?$", re.S)


def parse_override(text: str, registry: Registry | None = None) -> Override:
    """Parse ``<metric>=pass|fail: <justification>``."""
    registry = registry or builtin_registry()
    m = _OVERRIDE.match(text)
    if not m:
        raise OverrideError(f"override {text!r} is not '<metric>=pass|fail: <justification>'")
    ident, decision, why = m.group(1), m.group(2).lower(), (m.group(3) or "").strip()
    if decision not in ("pass", "fail"):
        raise OverrideError(f"override {text!r}: decision must be pass or fail")
    ind = lookup(registry, ident)
    if ind.mode is Mode.MANUAL_ONLY:
        raise OverrideOnManualIndicator(f"{ident} is manual-only; change its answer instead")
    if not why:
        raise OverrideWithoutJustification(f"override of {ident} needs a justification")
    status = MetricStatus.PASS if decision == "pass" else MetricStatus.FAIL
    return Override(ind.metric_id, status, why)


def read_overrides(path: str | Path, registry: Registry | None = None) -> list[Override]:
    out = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append(parse_override(line, registry))
    return out


@dataclass(frozen=True)
class HybridOutcome:
    indicator_id: str
    partner_id: str | None
    principle: str
    basis: str
    point: int
    status: str  # metric status value, maturity label, or decided override
    evidence: tuple[str, ...] = ()
    auto_status: str | None = None
    manual_level: int | None = None

    @property
    def letter(self) -> str:
        return self.principle[0]

    @property
    def not_applicable(self) -> bool:
        if self.basis == MANUAL:
            return self.manual_level == 0
        if self.basis == AUTOMATED:
            return self.status == MetricStatus.NOT_APPLICABLE.value
        return False

    @property
    def bar_level(self) -> int:
        """Length on the 0-4 maturity axis."""
        if self.basis == MANUAL:
            return int(self.manual_level or 0)
        if self.basis == OVERRIDE:
            return 4 if self.point else 1
        return {"Pass": 4, "Partial": 2, "Fail": 1, "NotApplicable": 0}[self.status]


def merge(
    answers: AnswerSet,
    auto: AutoReport,
    registry: Registry | None = None,
    overrides: Sequence[Override] = (),
) -> list[HybridOutcome]:
    """One outcome per registry indicator, in registry order."""
    registry = registry or builtin_registry()
    by_metric: dict[str, Override] = {}
    for ov in overrides:
        ind = lookup(registry, ov.metric_id)
        if ind.mode is Mode.MANUAL_ONLY:
            raise OverrideOnManualIndicator(f"{ov.metric_id} is manual-only")
        if not ov.justification.strip():
            raise OverrideWithoutJustification(f"override of {ov.metric_id} needs a justification")
        by_metric[ind.metric_id] = ov

    outcomes = []
    for ind in registry:
        sub = ind.principle.sub
        if ind.mode is Mode.MANUAL_ONLY:
            level = answers.level(ind.id)
            if level is None:
                raise IncompleteOutcomes(f"no manual answer for {ind.id}")
            note = answers.answers[ind.id].note
            outcomes.append(HybridOutcome(
                indicator_id=ind.id, partner_id=None, principle=sub, basis=MANUAL,
                point=int(level == MaturityLevel.FULLY_IMPLEMENTED), status=MaturityLevel(level).label,
                evidence=(f"maturity level {int(level)} ({MaturityLevel(level).label})",) + ((note,) if note else ()),
                manual_level=int(level),
            ))
            continue

        result = auto.results[ind.metric_id]
        superseded = answers.level(ind.id) if ind.mode is Mode.DUAL else None
        if superseded is not None:
            log.info("manual answer %s=%d superseded by %s", ind.id, superseded, ind.metric_id)
        ov = by_metric.get(ind.metric_id)
        if ov is not None:
            outcomes.append(HybridOutcome(
                indicator_id=ind.id, partner_id=ind.dual_partner, principle=sub, basis=OVERRIDE,
                point=int(ov.decided is MetricStatus.PASS), status=ov.decided.value,
                evidence=(f"override: {ov.justification}",) + result.evidence,
                auto_status=result.status.value,
            ))
        else:
            outcomes.append(HybridOutcome(
                indicator_id=ind.id, partner_id=ind.dual_partner, principle=sub, basis=AUTOMATED,
                point=int(result.status is MetricStatus.PASS), status=result.status.value,
                evidence=result.evidence, auto_status=result.status.value,
            ))
    return outcomes


@dataclass(frozen=True)
class FairScore:
    per_letter: dict[str, tuple[int, int]]
    total_earned: int
    total_max: int
    percent: str
    excluded: tuple[str, ...] = ()

    def lines(self) -> list[str]:
        return [f"{k} {e}/{m}" for k, (e, m) in self.per_letter.items()]


def format_percent(earned: int, total: int) -> str:
    """100 * earned / total to one decimal, ties away from zero, exactly."""
    if total <= 0:
        return "0.0"
    q, r = divmod(earned * 1000, total)
    if 2 * r >= total:
        q += 1
    return f"{q // 10}.{q % 10}"


def compute_score(
    outcomes: Iterable[HybridOutcome],
    registry: Registry | None = None,
    exclude_na: bool = False,
) -> FairScore:
    registry = registry or builtin_registry()
    outcomes = list(outcomes)
    ids = [o.indicator_id for o in outcomes]
    expected = [i.id for i in registry]
    if sorted(ids) != sorted(expected):
        missing = sorted(set(expected) - set(ids))
        extra = sorted(set(ids) - set(expected))
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise IncompleteOutcomes(f"outcomes must cover each indicator once (missing {missing}, "
                                 f"unexpected {extra}, duplicated {dup})")
    per = {letter: [0, 0] for letter in LETTERS}
    excluded = []
    for o in outcomes:
        if o.point not in (0, 1):
            raise IncompleteOutcomes(f"{o.indicator_id}: point must be 0 or 1")
        if exclude_na and o.not_applicable:
            excluded.append(o.indicator_id)
            continue
        per[o.letter][0] += o.point
        per[o.letter][1] += 1
    earned = sum(e for e, _ in per.values())
    total = sum(m for _, m in per.values())
    return FairScore(
        per_letter={k: (e, m) for k, (e, m) in per.items()},
        total_earned=earned,
        total_max=total,
        percent=format_percent(earned, total),
        excluded=tuple(excluded),
    )

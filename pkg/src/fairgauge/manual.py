"""Self-assessment answers on the 0-4 maturity scale.

Answer files hold one ``<indicator-id> <level> [# note]`` per line. A
``# subject: <identifier>`` comment names what was assessed; other comments
and blank lines are ignored.
"""

from __future__ import annotations

import enum
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, TextIO

from .errors import (
    Aborted,
    DuplicateAnswer,
    LevelOutOfRange,
    MalformedAnswerLine,
    MissingAnswers,
    UnknownAnswerIndicator,
    UnknownIndicator,
)
from .registry import Mode, Registry, builtin_registry, lookup


class MaturityLevel(enum.IntEnum):
    NOT_APPLICABLE = 0
    NOT_CONSIDERED = 1
    UNDER_CONSIDERATION = 2
    IN_IMPLEMENTATION = 3
    FULLY_IMPLEMENTED = 4

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    MaturityLevel.NOT_APPLICABLE: "NotApplicable",
    MaturityLevel.NOT_CONSIDERED: "NotConsidered",
    MaturityLevel.UNDER_CONSIDERATION: "UnderConsideration",
    MaturityLevel.IN_IMPLEMENTATION: "InImplementation",
    MaturityLevel.FULLY_IMPLEMENTED: "FullyImplemented",
}


@dataclass(frozen=True)
class Answer:
    level: MaturityLevel
    note: str | None = None


@dataclass(frozen=True)
class AnswerSet:
    answers: dict[str, Answer] = field(default_factory=dict)
    subject: str = ""

    def level(self, indicator_id: str) -> MaturityLevel | None:
        a = self.answers.get(indicator_id)
        return a.level if a else None

    def __len__(self) -> int:
        return len(self.answers)


@dataclass(frozen=True)
class Finding:
    severity: str  # error | warning | info
    indicator_id: str
    code: str
    message: str


_SUBJECT = re.compile(r"^#\s*subject:\s*(.*?)\s*$", re.I)
_LINE = re.compile(r"^(\S+)\s+(\S+)\s*(?:#\s?(.*))?$")


def parse_answers_text(text: str, registry: Registry | None = None, source: str = "<answers>") -> AnswerSet:
    registry = registry or builtin_registry()
    answers: dict[str, Answer] = {}
    first_line: dict[str, int] = {}
    subject = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _SUBJECT.match(line)
            if m and not subject:
                subject = m.group(1)
            continue
        m = _LINE.match(line)
        if not m:
            raise MalformedAnswerLine(f"{source}:{lineno}: expected '<id> <level> [# note]'", lineno, raw)
        ident, level_text, note = m.group(1), m.group(2), m.group(3)
        try:
            lookup(registry, ident)
        except UnknownIndicator:
            raise UnknownAnswerIndicator(f"{source}:{lineno}: unknown indicator {ident!r}", lineno, raw) from None
        if not re.fullmatch(r"-?\d+", level_text):
            raise MalformedAnswerLine(f"{source}:{lineno}: level {level_text!r} is not an integer", lineno, raw)
        level = int(level_text)
        if not 0 <= level <= 4:
            raise LevelOutOfRange(f"{source}:{lineno}: level {level} outside 0-4", lineno, raw)
        if ident in answers:
            raise DuplicateAnswer(
                f"{source}:{lineno}: duplicate answer for {ident} (first on line {first_line[ident]})", lineno, raw
            )
        answers[ident] = Answer(MaturityLevel(level), note.strip() if note and note.strip() else None)
        first_line[ident] = lineno
    return AnswerSet(answers, subject)


def parse_answers(path: str | os.PathLike, registry: Registry | None = None) -> AnswerSet:
    p = Path(path)
    return parse_answers_text(p.read_text(encoding="utf-8"), registry, str(p))


def serialize_answers(answers: AnswerSet) -> str:
    lines = []
    if answers.subject:
        lines.append(f"# subject: {answers.subject}")
    for ident, a in answers.answers.items():
        line = f"{ident} {int(a.level)}"
        if a.note:
            line += f" # {a.note}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def validate_answers(answers: AnswerSet, registry: Registry | None = None, strict: bool = True) -> list[Finding]:
    """Check an answer set against the registry.

    Strict mode raises MissingAnswers when any manual-only indicator lacks an
    answer. Lenient mode reports a warning per gap instead; see
    :func:`effective_answers` for the defaulted assignment.
    """
    registry = registry or builtin_registry()
    findings: list[Finding] = []
    for ident in answers.answers:
        ind = lookup(registry, ident)
        if ind.mode is Mode.DUAL and ident == ind.id:
            findings.append(Finding("info", ident, "Superseded",
                                    f"superseded by automated result {ind.dual_partner}"))
        elif ident != ind.id or ind.mode is Mode.AUTOMATED_ONLY:
            findings.append(Finding("error", ident, "UnknownManualIndicator",
                                    f"{ident} is an automated metric and takes no manual answer"))
    missing = [i for i in registry.manual_ids if i not in answers.answers]
    if missing and strict:
        raise MissingAnswers(missing)
    for ident in missing:
        findings.append(Finding("warning", ident, "DefaultedToNotConsidered",
                                f"no answer for {ident}; assuming level 1 (NotConsidered)"))
    return findings


def effective_answers(answers: AnswerSet, registry: Registry | None = None) -> AnswerSet:
    """Total assignment over the manual-only indicators, gaps at level 1."""
    registry = registry or builtin_registry()
    out = {}
    for ident in registry.manual_ids:
        out[ident] = answers.answers.get(ident, Answer(MaturityLevel.NOT_CONSIDERED, None))
    return AnswerSet(out, answers.subject)


# -- interactive -----------------------------------------------------------------

def _prompt_text(ind, default: MaturityLevel | None) -> str:
    levels = "  ".join(f"{int(lv)}={lv.label}" for lv in MaturityLevel)
    tail = f" [{int(default)}]" if default is not None else ""
    return f"{ind.id}: {ind.description}\n  {levels}\n  level{tail}: "


def interactive_fill(
    registry: Registry | None = None,
    existing: AnswerSet | None = None,
    *,
    input_fn: Callable[[str], str] = input,
    output: TextIO | None = None,
    out_path: str | os.PathLike | None = None,
    draft_path: str | os.PathLike | None = None,
    subject: str | None = None,
) -> AnswerSet:
    """Prompt once per manual-only indicator.

    An empty reply keeps the existing answer. On interrupt the answers given
    so far go to ``draft_path`` and :class:`Aborted` is raised.
    """
    registry = registry or builtin_registry()
    output = output or sys.stderr
    existing = existing or AnswerSet()
    collected: dict[str, Answer] = {}
    subject = subject if subject is not None else existing.subject
    try:
        for ind in registry.by_mode(Mode.MANUAL_ONLY):
            prior = existing.answers.get(ind.id)
            while True:
                reply = input_fn(_prompt_text(ind, prior.level if prior else None)).strip()
                if not reply and prior is not None:
                    collected[ind.id] = prior
                    break
                if reply in {"0", "1", "2", "3", "4"}:
                    note = prior.note if prior else None
                    collected[ind.id] = Answer(MaturityLevel(int(reply)), note)
                    break
                print("  please enter a level from 0 to 4", file=output)
    except (KeyboardInterrupt, EOFError):
        # one line per answer given; no header so the draft counts answers
        draft = Path(draft_path or (str(out_path) + ".draft" if out_path else "answers.draft"))
        draft.write_text(serialize_answers(AnswerSet(collected)) if collected else "", encoding="utf-8")
        raise Aborted(draft, len(collected)) from None
    result = AnswerSet(collected, subject)
    if out_path is not None:
        Path(out_path).write_text(serialize_answers(result), encoding="utf-8")
    return result

"""Exception hierarchy shared by all fairgauge modules.

Every domain failure derives from :class:`FairGaugeError` so the CLI can map
it onto exit code 2 without catching unrelated bugs.
"""

from __future__ import annotations


class FairGaugeError(Exception):
    """Base class for domain errors."""


# registry
class UnknownIndicator(FairGaugeError):
    pass


# harvest
class TargetUnreadable(FairGaugeError):
    pass


class FetchFailed(FairGaugeError):
    pass


# manual answers
class AnswerFileError(FairGaugeError):
    """An answer file line could not be accepted."""

    def __init__(self, message: str, lineno: int | None = None, line: str | None = None):
        self.lineno = lineno
        self.line = line
        if line is not None:
            message = f"{message} ({line.strip()!r})"
        super().__init__(message)


class UnknownAnswerIndicator(AnswerFileError, UnknownIndicator):
    pass


class LevelOutOfRange(AnswerFileError):
    pass


class DuplicateAnswer(AnswerFileError):
    pass


class MalformedAnswerLine(AnswerFileError):
    pass


class MissingAnswers(FairGaugeError):
    def __init__(self, missing: list[str]):
        self.missing = list(missing)
        super().__init__(f"{len(self.missing)} manual indicator(s) lack an answer: {', '.join(self.missing)}")


class Aborted(FairGaugeError):
    def __init__(self, draft_path, answered: int):
        self.draft_path = draft_path
        self.answered = answered
        super().__init__(f"interrupted after {answered} answer(s); draft saved to {draft_path}")


# hybrid scoring
class OverrideError(FairGaugeError):
    pass


class OverrideWithoutJustification(OverrideError):
    pass


class OverrideOnManualIndicator(OverrideError):
    pass


class IncompleteOutcomes(FairGaugeError):
    pass


# annotation
class MappingError(FairGaugeError):
    pass


class UndeclaredPrefix(MappingError):
    pass


class MissingRowToken(MappingError):
    pass


class UnitWithoutQuantity(MappingError):
    pass


class DuplicateColumnBinding(MappingError):
    pass


class MissingColumn(FairGaugeError):
    pass


class CellTypeError(FairGaugeError):
    def __init__(self, row: int, column: str, text: str, datatype: str):
        self.row = row
        self.column = column
        self.text = text
        super().__init__(f"row {row}, column {column!r}: cannot read {text!r} as {datatype}")


class LinkedDataError(FairGaugeError):
    pass


# decision trees
class InvalidTree(FairGaugeError):
    pass


class CycleDetected(InvalidTree):
    pass


class UnreachableNode(InvalidTree):
    pass


class MixedNodeKind(InvalidTree):
    pass


class DanglingChild(InvalidTree):
    pass


class UnknownTerm(InvalidTree):
    pass


class MissingFeature(FairGaugeError):
    def __init__(self, feature: str, node_id: str):
        self.feature = feature
        self.node_id = node_id
        super().__init__(f"feature {feature!r} required at node {node_id!r} is missing")


# reporting
class InvalidReport(FairGaugeError):
    pass

"""Assessment reports: canonical JSON, terminal summary and SVG chart."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .errors import InvalidReport
from .hybrid import FairScore, HybridOutcome, Override, compute_score
from .registry import LETTERS, REGISTRY_VERSION, Registry, builtin_registry, lookup

FORMAT = "fairgauge-report/1"


@dataclass(frozen=True)
class ReportDocument:
    target: str
    timestamp: str
    score: FairScore
    rows: tuple[HybridOutcome, ...]
    overrides: tuple[Override, ...] = ()
    config_digests: dict[str, str] = field(default_factory=dict)
    exclude_na: bool = False
    registry_version: str = REGISTRY_VERSION

    def check(self, registry: Registry | None = None) -> None:
        """Raise InvalidReport unless rows are complete and the score matches them."""
        registry = registry or builtin_registry()
        if len(self.rows) != len(registry):
            raise InvalidReport(f"report has {len(self.rows)} rows, expected {len(registry)}")
        try:
            expected = compute_score(self.rows, registry, self.exclude_na)
        except Exception as exc:
            raise InvalidReport(str(exc)) from exc
        if expected != self.score:
            raise InvalidReport(
                f"stored score {self.score.total_earned}/{self.score.total_max} ({self.score.percent}%) "
                f"disagrees with rows ({expected.total_earned}/{expected.total_max}, {expected.percent}%)"
            )


def build_report(
    target: str,
    timestamp: str,
    outcomes,
    *,
    overrides=(),
    config_digests: dict[str, str] | None = None,
    exclude_na: bool = False,
    registry: Registry | None = None,
) -> ReportDocument:
    registry = registry or builtin_registry()
    rows = tuple(outcomes)
    return ReportDocument(
        target=target,
        timestamp=timestamp,
        score=compute_score(rows, registry, exclude_na),
        rows=rows,
        overrides=tuple(overrides),
        config_digests=dict(config_digests or {}),
        exclude_na=exclude_na,
        registry_version=registry.version,
    )


# -- JSON ----------------------------------------------------------------------

def _row_dict(o: HybridOutcome) -> dict:
    return {
        "indicator": o.indicator_id,
        "partner": o.partner_id,
        "principle": o.principle,
        "basis": o.basis,
        "point": o.point,
        "status": o.status,
        "auto_status": o.auto_status,
        "manual_level": o.manual_level,
        "evidence": list(o.evidence),
    }


def report_to_dict(report: ReportDocument) -> dict:
    s = report.score
    return {
        "format": FORMAT,
        "target": report.target,
        "timestamp": report.timestamp,
        "registry_version": report.registry_version,
        "score": {
            "principles": {k: {"earned": e, "max": m} for k, (e, m) in s.per_letter.items()},
            "earned": s.total_earned,
            "max": s.total_max,
            "percent": s.percent,
            "exclude_na": report.exclude_na,
            "excluded": list(s.excluded),
        },
        "rows": [_row_dict(o) for o in report.rows],
        "overrides": [
            {"metric": o.metric_id, "decided": o.decided.value, "justification": o.justification}
            for o in report.overrides
        ],
        "config_digests": dict(sorted(report.config_digests.items())),
    }


def render_json(report: ReportDocument) -> bytes:
    return (json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def parse_report(data: bytes | str | dict, registry: Registry | None = None) -> ReportDocument:
    """Load a JSON report and check it; the score is recomputed from the rows."""
    from .autoeval import MetricStatus

    registry = registry or builtin_registry()
    try:
        if isinstance(data, (bytes, str)):
            data = json.loads(data)
        if data.get("format") != FORMAT:
            raise InvalidReport(f"unsupported report format {data.get('format')!r}")
        rows = []
        for r in data["rows"]:
            lookup(registry, r["indicator"])
            rows.append(HybridOutcome(
                indicator_id=r["indicator"],
                partner_id=r["partner"],
                principle=r["principle"],
                basis=r["basis"],
                point=int(r["point"]),
                status=r["status"],
                evidence=tuple(r["evidence"]),
                auto_status=r["auto_status"],
                manual_level=r["manual_level"],
            ))
        overrides = tuple(
            Override(o["metric"], MetricStatus(o["decided"]), o["justification"]) for o in data["overrides"]
        )
        score = data["score"]
        exclude_na = bool(score["exclude_na"])
        stored = FairScore(
            per_letter={k: (v["earned"], v["max"]) for k, v in score["principles"].items()},
            total_earned=score["earned"],
            total_max=score["max"],
            percent=score["percent"],
            excluded=tuple(score["excluded"]),
        )
        report = ReportDocument(
            target=data["target"],
            timestamp=data["timestamp"],
            score=stored,
            rows=tuple(rows),
            overrides=overrides,
            config_digests=dict(data["config_digests"]),
            exclude_na=exclude_na,
            registry_version=data["registry_version"],
        )
    except InvalidReport:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InvalidReport(f"malformed report: {exc!r}") from exc
    except Exception as exc:  # domain errors from lookup and friends
        raise InvalidReport(str(exc)) from exc
    report.check(registry)
    return report


# -- text ----------------------------------------------------------------------

def render_text(report: ReportDocument) -> str:
    if not report.rows:
        raise InvalidReport("report has no rows")
    report.check()
    s = report.score
    out = [f"Target: {report.target}", f"Assessed: {report.timestamp}", ""]
    out += s.lines()
    out.append(f"FAIR score: {s.percent}%  ({s.total_earned}/{s.total_max} points)")
    if s.excluded:
        out.append("Excluded as not applicable: " + ", ".join(s.excluded))
    if report.overrides:
        out += ["", "Overrides:"]
        out += [f"  {o.render()}" for o in report.overrides]
    missed = [o for o in report.rows if not o.point]
    if missed:
        out += ["", "Not earned:"]
        for o in missed:
            label = o.indicator_id + (f" / {o.partner_id}" if o.partner_id else "")
            out.append(f"  {label} [{o.principle}, {o.basis}] {o.status}")
            out += [f"      - {e}" for e in o.evidence]
    return "\n".join(out) + "\n"


# -- SVG -----------------------------------------------------------------------

COLORS = {"F": "#3b6fb6", "A": "#3a9a5b", "I": "#e08a2c", "R": "#8a5cb8"}
_BAR_H, _GAP, _GROUP_GAP = 12, 4, 18
_LABEL_W, _UNIT, _LEFT = 200, 90, 20
_TOP = 150


def _f(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def _gauge(cx: float, cy: float, r: float, percent: str) -> list[str]:
    frac = min(max(float(percent) / 100.0, 0.0), 1.0)
    parts = [
        f'<circle class="gauge-track" cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" fill="none" '
        f'stroke="#e3e3e3" stroke-width="12"/>'
    ]
    if frac >= 1.0:
        parts.append(
            f'<circle class="gauge-value" cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" fill="none" '
            f'stroke="#2f7d4f" stroke-width="12"/>'
        )
    elif frac > 0:
        angle = 2 * math.pi * frac
        x0, y0 = cx, cy - r
        x1, y1 = cx + r * math.sin(angle), cy - r * math.cos(angle)
        large = 1 if frac > 0.5 else 0
        parts.append(
            f'<path class="gauge-value" d="M {_f(x0)} {_f(y0)} A {_f(r)} {_f(r)} 0 {large} 1 {_f(x1)} {_f(y1)}" '
            f'fill="none" stroke="#2f7d4f" stroke-width="12"/>'
        )
    parts.append(
        f'<text class="gauge-label" x="{_f(cx)}" y="{_f(cy + 7)}" text-anchor="middle" '
        f'font-size="20" font-weight="bold">{percent}%</text>'
    )
    return parts


def render_svg(report: ReportDocument) -> bytes:
    """Horizontal maturity chart: one bar per indicator on the 0-4 axis."""
    if not report.rows:
        raise InvalidReport("report has no rows")
    report.check()
    groups = {letter: [o for o in report.rows if o.letter == letter] for letter in LETTERS}
    height = _TOP + sum(len(g) * (_BAR_H + _GAP) + _GROUP_GAP + 16 for g in groups.values()) + 30
    x0 = _LEFT + _LABEL_W
    width = x0 + 4 * _UNIT + 60
    s = report.score

    body = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<title>FAIR maturity: {escape(report.target)}</title>',
        f'<path class="background" d="M 0 0 H {width} V {height} H 0 Z" fill="#ffffff"/>',
        f'<text x="{_LEFT}" y="30" font-size="16" font-weight="bold">FAIR maturity</text>',
        f'<text x="{_LEFT}" y="50">{escape(report.target)}</text>',
        f'<text x="{_LEFT}" y="68">{escape(report.timestamp)}</text>',
    ]
    for i, (letter, (e, m)) in enumerate(s.per_letter.items()):
        body.append(
            f'<text x="{_LEFT + i * 70}" y="100" fill="{COLORS[letter]}" font-weight="bold">{letter} {e}/{m}</text>'
        )
    body += _gauge(width - 80, 70, 45, s.percent)

    # axis
    axis_bottom = height - 30
    for level in range(5):
        x = x0 + level * _UNIT
        body.append(f'<line class="grid" x1="{x}" y1="{_TOP - 12}" x2="{x}" y2="{axis_bottom}" stroke="#dddddd"/>')
        body.append(f'<text x="{x}" y="{_TOP - 16}" text-anchor="middle" fill="#666666">{level}</text>')

    y = _TOP
    for letter, rows in groups.items():
        y += 12
        body.append(f'<text class="group" x="{_LEFT}" y="{y}" font-weight="bold" '
                    f'fill="{COLORS[letter]}">{letter}</text>')
        y += 4 + _GROUP_GAP - 12
        for o in rows:
            label = o.indicator_id + (f" / {o.partner_id}" if o.partner_id else "")
            opacity = "1" if o.point else "0.45"
            body.append(
                f'<text x="{_LEFT + 10}" y="{y + _BAR_H - 2}">{escape(label)}</text>'
            )
            body.append(
                f'<rect class="bar" x="{x0}" y="{y}" width="{o.bar_level * _UNIT}" height="{_BAR_H}" '
                f'fill="{COLORS[letter]}" fill-opacity="{opacity}" data-point="{o.point}" '
                f'data-basis="{o.basis}"><title>{escape(label)}: {escape(o.status)} '
                f'({o.basis})</title></rect>'
            )
            y += _BAR_H + _GAP
        y += 16 - _GAP
    body.append("</svg>")
    return ("\n".join(body) + "\n").encode("utf-8")

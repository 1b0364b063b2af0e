import dataclasses
import json
import re
import xml.etree.ElementTree as ET
from pathlib import Path

import jsonschema
import pytest

from fairgauge.errors import InvalidReport
from fairgauge.hybrid import AUTOMATED, MANUAL, HybridOutcome
from fairgauge.registry import builtin_registry
from fairgauge.report import (
    build_report,
    parse_report,
    render_json,
    render_svg,
    render_text,
    report_to_dict,
)

SCHEMA = json.loads((Path(__file__).resolve().parent.parent / "docs" / "report-schema.json").read_text())
SVG = "{http://www.w3.org/2000/svg}"


def _uniform(point: int):
    rows = []
    for ind in builtin_registry():
        if ind.mode.value == "ManualOnly":
            level = 4 if point else 1
            rows.append(HybridOutcome(ind.id, None, ind.principle.sub, MANUAL, point,
                                      "FullyImplemented" if point else "NotConsidered", manual_level=level))
        else:
            status = "Pass" if point else "Fail"
            rows.append(HybridOutcome(ind.id, ind.dual_partner, ind.principle.sub, AUTOMATED, point, status,
                                      ("checked",), auto_status=status))
    return build_report("doi:10.5281/zenodo.1", "2024-01-01T00:00:00Z", rows)


def test_json_fixed_point(post_report):
    once = render_json(post_report)
    assert render_json(parse_report(once)) == once
    assert once.endswith(b"\n")


def test_json_values(post_report, pre_report):
    post = report_to_dict(post_report)
    assert post["score"]["percent"] == "83.0"
    assert (post["score"]["earned"], post["score"]["max"]) == (39, 47)
    assert len(post["rows"]) == 47
    assert report_to_dict(pre_report)["score"]["percent"] == "6.4"
    assert report_to_dict(_uniform(0))["score"]["percent"] == "0.0"


def test_json_matches_schema(post_report, pre_report):
    for doc in (post_report, pre_report, _uniform(1)):
        jsonschema.validate(json.loads(render_json(doc)), SCHEMA)


def test_tampered_score_rejected(post_report):
    data = json.loads(render_json(post_report))
    data["score"]["percent"] = "90.0"
    with pytest.raises(InvalidReport):
        parse_report(data)
    data = json.loads(render_json(post_report))
    data["rows"][0]["point"] = 0
    with pytest.raises(InvalidReport):
        parse_report(data)


def test_missing_rows_rejected(post_report):
    data = json.loads(render_json(post_report))
    data["rows"].pop()
    with pytest.raises(InvalidReport):
        parse_report(data)


def test_wrong_format_rejected(post_report):
    data = json.loads(render_json(post_report))
    data["format"] = "other/2"
    with pytest.raises(InvalidReport):
        parse_report(data)
    with pytest.raises(InvalidReport):
        parse_report({"format": "fairgauge-report/1"})


def test_empty_rows_cannot_render(post_report):
    empty = dataclasses.replace(post_report, rows=())
    with pytest.raises(InvalidReport):
        render_text(empty)
    with pytest.raises(InvalidReport):
        render_svg(empty)


def test_text_summary(post_report, pre_report):
    text = render_text(post_report)
    for line in ("F 8/8", "A 13/13", "I 10/14", "R 8/12"):
        assert line in text.splitlines()
    assert "FAIR score: 83.0%" in text
    assert "FsF-R1.2-01M=pass:" in text
    pre = render_text(pre_report)
    assert "RDA-F1-01D / FsF-F1-02D" in pre
    assert "FAIR score: 6.4%" in pre


def _bars(svg: bytes):
    root = ET.fromstring(svg)
    return root, [r for r in root.iter(SVG + "rect") if r.get("class") == "bar"]


def test_svg_has_one_bar_per_indicator(post_report):
    root, bars = _bars(render_svg(post_report))
    assert len(bars) == 47
    widths = {float(b.get("width")) for b in bars}
    assert 0 < min(widths) and max(widths) == 4 * min(w for w in widths if w)  # levels 1..4
    labels = [t.text for t in root.iter(SVG + "text")]
    assert "83.0%" in labels


def test_svg_full_score_gauge():
    root, bars = _bars(render_svg(_uniform(1)))
    assert len(bars) == 47
    assert "100.0%" in [t.text for t in root.iter(SVG + "text")]
    assert [c for c in root.iter(SVG + "circle") if c.get("class") == "gauge-value"]


def test_svg_zero_score_has_no_arc():
    root, _ = _bars(render_svg(_uniform(0)))
    assert not [e for e in root.iter() if e.get("class") == "gauge-value"]
    assert "0.0%" in [t.text for t in root.iter(SVG + "text")]


def test_svg_escapes_target(post_report):
    doc = dataclasses.replace(post_report, target="a<b>&c")
    ET.fromstring(render_svg(doc))


def test_rendering_is_byte_deterministic(post_report):
    from conftest import POST, run_hybrid

    again = run_hybrid(POST)
    assert render_svg(again) == render_svg(post_report)
    assert render_json(again) == render_json(post_report)
    assert render_text(again) == render_text(post_report)
    coords = re.findall(rb' (?:x|y|width|height|cx|cy|r)="([^"]+)"', render_svg(post_report))
    assert all(re.fullmatch(rb"-?\d+(\.\d{1,2})?", c) for c in coords)

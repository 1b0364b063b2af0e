"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``PASS criterion N: ...`` or ``FAIL criterion N: ...``
line (visible with ``-s``) and the lines are repeated in the terminal summary.
"""

import csv
import json
import random
import time
import xml.etree.ElementTree as ET
from contextlib import contextmanager
from decimal import Decimal

import rdflib
from rdflib.compare import isomorphic

from conftest import ACCEPTANCE_LINES, UVM_ROW, POST, PRE, run_auto, run_hybrid
from test_annotate import ROW_JSONLD
from test_registry import AUTOMATED_ONLY, DUAL_PAIRS
from treegen import random_tree, random_vector
from fairgauge.annotate import annotate_csv, build_mapping, parse_mapping
from fairgauge.autoeval import AutoReport, MetricResult, MetricStatus
from fairgauge.hybrid import AUTOMATED, MANUAL, HybridOutcome, compute_score, merge
from fairgauge.linkeddata import parse_linked_data, serialize_linked_data
from fairgauge.manual import Answer, AnswerSet, MaturityLevel
from fairgauge.registry import Mode, builtin_registry
from fairgauge.report import build_report, render_svg, render_text
from fairgauge.treemodel import annotate_tree, evaluate, parse_annotated

REG = builtin_registry()


@contextmanager
def criterion(number: int, summary: str):
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        line = f"FAIL criterion {number}: {summary} ({type(exc).__name__}: {exc})"
        print(line)
        ACCEPTANCE_LINES.append(line)
        raise
    line = f"PASS criterion {number}: {summary} [{time.perf_counter() - start:.2f}s]"
    print(line)
    ACCEPTANCE_LINES.append(line)


def _rows(earned: int):
    """47 outcomes with exactly ``earned`` points."""
    out = []
    for i, ind in enumerate(REG):
        point = int(i < earned)
        if ind.mode is Mode.MANUAL_ONLY:
            out.append(HybridOutcome(ind.id, None, ind.principle.sub, MANUAL, point, "x",
                                     manual_level=4 if point else 2))
        else:
            status = "Pass" if point else "Fail"
            out.append(HybridOutcome(ind.id, ind.dual_partner, ind.principle.sub, AUTOMATED, point, status,
                                     auto_status=status))
    return out


def test_criterion_1_registry():
    with criterion(1, "registry has 47 indicators, maxima F8 A13 I14 R12, 11 dual, 17 automated, 30 manual"):
        assert len(REG) == 47
        assert REG.maxima() == {"F": 8, "A": 13, "I": 14, "R": 12}
        duals = {i.id: i.dual_partner for i in REG if i.mode is Mode.DUAL}
        assert duals == DUAL_PAIRS
        assert {i.id for i in REG.by_mode(Mode.AUTOMATED_ONLY)} == AUTOMATED_ONLY
        assert len(REG.automated_ids) == 17
        assert len(REG.by_mode(Mode.AUTOMATED_ONLY)) == 6
        assert len(REG.by_mode(Mode.MANUAL_ONLY)) == 30


def test_criterion_2_scoring_arithmetic():
    with criterion(2, "9/47 -> 19.1%, 39/47 -> 83.0%, 0 -> 0.0%, 47 -> 100.0%"):
        for earned, text in ((9, "19.1"), (39, "83.0"), (0, "0.0"), (47, "100.0")):
            score = compute_score(_rows(earned), REG)
            assert (score.total_earned, score.total_max) == (earned, 47)
            assert score.percent == text


def test_criterion_3_pre_fixture():
    with criterion(3, "pre fixture: F1-01D Pass, F1-02D/R1.1-01M/I1-01M Fail, F2-01M not Pass, score <= 25%"):
        _, _, auto = run_auto(PRE)
        assert auto.status("FsF-F1-01D") is MetricStatus.PASS
        assert auto.status("FsF-F1-02D") is MetricStatus.FAIL
        assert auto.status("FsF-R1.1-01M") is MetricStatus.FAIL
        assert auto.status("FsF-I1-01M") is MetricStatus.FAIL
        assert auto.status("FsF-F2-01M") is not MetricStatus.PASS
        score = run_hybrid(PRE).score
        assert Decimal(score.percent) <= Decimal("25.0"), score.percent


def test_criterion_4_post_fixture():
    with criterion(4, "post fixture: F 8/8, A 13/13, I1-02M Fail, R1.2-01M Partial then overridden, score in [80, 85]"):
        _, _, auto = run_auto(POST)
        assert auto.status("FsF-I1-02M") is MetricStatus.FAIL
        assert auto.status("FsF-R1.2-01M") is MetricStatus.PARTIAL
        plain = run_hybrid(POST, overrides=False)
        assert next(o for o in plain.rows if o.indicator_id == "FsF-R1.2-01M").point == 0
        doc = run_hybrid(POST)
        assert doc.score.per_letter["F"] == (8, 8)
        assert doc.score.per_letter["A"] == (13, 13)
        assert next(o for o in doc.rows if o.indicator_id == "FsF-R1.2-01M").point == 1
        assert Decimal("80.0") <= Decimal(doc.score.percent) <= Decimal("85.0"), doc.score.percent


def test_criterion_5_one_row_csv():
    with criterion(5, "one-row CSV annotation equals the reference document up to blank-node names"):
        doc = annotate_csv(UVM_ROW / "test.csv", parse_mapping(UVM_ROW / "mapping.json"))
        got = rdflib.Graph().parse(data=serialize_linked_data(doc).decode(), format="json-ld")
        expected = rdflib.Graph().parse(data=json.dumps(ROW_JSONLD), format="json-ld")
        assert isomorphic(got, expected)
        row = doc.nodes[0]
        values = {k: v for k, v in row.properties}
        assert values["hpc:codeVariant"].value == "111100"
        assert values["hpc:allocatedDataSize"].value == 8000000
        assert values["hpc:arrayID"].value == "0"
        assert values["hpc:commandLineOption"].value == "graph1MW.6"
        assert values["hpc:gpuPageFault"].value == 5
        quantity = doc.node(values["hpc:hostToDeviceTransferSize"].id)
        assert quantity.first("qudt:unit").id == "unit:KiloBYTE"
        assert quantity.first("qudt:value").value == Decimal("7872.0")


def test_criterion_6_tree_round_trip():
    trees, vectors = 1000, 100
    with criterion(6, f"{trees} random trees x {vectors} vectors agree after annotate -> parse"):
        rng = random.Random(20231114)
        checked = 0
        for i in range(trees):
            tree = random_tree(rng, max_depth=i % 13, max_nodes=512)
            assert tree.depth() <= 12
            doc = annotate_tree(tree)
            back = parse_annotated(parse_linked_data(serialize_linked_data(doc)))
            # structural bijection: same ids, levels, children, labels, features and thresholds
            assert back.root == tree.root
            assert back.nodes == tree.nodes
            assert len(doc.nodes) == len(tree.nodes) + 1
            for _ in range(vectors):
                vec = random_vector(rng, tree)
                assert evaluate(back, vec) == evaluate(tree, vec)
                checked += 1
        assert checked == trees * vectors


def _random_table(rng: random.Random, path):
    n_cols = rng.randint(1, 30)
    n_rows = rng.randint(0, 200)
    kinds = [rng.choice(["string", "integer", "decimal", "quantity", "unbound"]) for _ in range(n_cols)]
    header = [f"c{j}" for j in range(n_cols)]
    bindings = [
        {"column": h, "property": f"hpc:p{j}", "datatype": k} | ({"unit": "unit:KiloBYTE"} if k == "quantity" else {})
        for j, (h, k) in enumerate(zip(header, kinds)) if k != "unbound"
    ]

    def cell(kind):
        if rng.random() < 0.2:
            return ""
        if kind == "integer":
            return str(rng.randint(-10**9, 10**9))
        if kind in ("decimal", "quantity"):
            return str(Decimal(rng.randint(-10**6, 10**6)).scaleb(-rng.randint(0, 4)))
        return rng.choice(["a", "b c", "x,y", 'q"t', "ü", "0"]) + str(rng.randint(0, 99))

    rows = [[cell(k) for k in kinds] for _ in range(n_rows)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    mapping = build_mapping({"base_iri": "http://example.org/t.csv", "id_template": "#L{row}", "bindings": bindings})
    return rows, kinds, mapping


def test_criterion_7_csv_annotation(tmp_path):
    tables = 60
    with criterion(7, f"{tables} random CSVs: one node per row, one property per bound non-empty cell, stable bytes"):
        rng = random.Random(7)
        for t in range(tables):
            path = tmp_path / f"t{t}.csv"
            rows, kinds, mapping = _random_table(rng, path)
            doc = annotate_csv(path, mapping)
            row_nodes = [n for n in doc.nodes if mapping.row_type in n.types]
            assert len(row_nodes) == len(rows)
            for node, cells in zip(row_nodes, rows):
                bound = sum(1 for c, k in zip(cells, kinds) if k != "unbound" and c != "")
                assert len(node.properties) == bound
            assert serialize_linked_data(doc) == serialize_linked_data(annotate_csv(path, mapping))


def test_criterion_8_dual_dominance():
    with criterion(8, "manual level 0-4 on each dual indicator never changes its point"):
        base = {i: Answer(MaturityLevel.FULLY_IMPLEMENTED) for i in REG.manual_ids}
        for ind in REG.by_mode(Mode.DUAL):
            for status in MetricStatus:
                auto = AutoReport(
                    {m: MetricResult(m, status if m == ind.dual_partner else MetricStatus.PASS, ())
                     for m in REG.automated_ids},
                    "t", "2024-01-01T00:00:00Z", "",
                )
                points = set()
                for level in MaturityLevel:
                    answers = AnswerSet(base | {ind.id: Answer(level)})
                    row = next(o for o in merge(answers, auto, REG) if o.indicator_id == ind.id)
                    points.add(row.point)
                assert points == {int(status is MetricStatus.PASS)}, (ind.id, status)


def test_criterion_9_rendering():
    with criterion(9, "every 47-row report draws 47 bars; post text shows F 8/8 and A 13/13"):
        rng = random.Random(9)
        ns = "{http://www.w3.org/2000/svg}"
        for _ in range(50):
            rows = _rows(0)
            rows = [
                HybridOutcome(o.indicator_id, o.partner_id, o.principle, o.basis,
                              p := rng.randint(0, 1),
                              ("Pass" if p else rng.choice(["Fail", "Partial", "NotApplicable"]))
                              if o.basis == AUTOMATED else "x",
                              manual_level=(4 if p else rng.randint(0, 3)) if o.basis == MANUAL else None)
                for o in rows
            ]
            doc = build_report("t", "2024-01-01T00:00:00Z", rows, exclude_na=rng.random() < 0.5)
            bars = [r for r in ET.fromstring(render_svg(doc)).iter(ns + "rect") if r.get("class") == "bar"]
            assert len(bars) == 47
        text = render_text(run_hybrid(POST)).splitlines()
        assert "F 8/8" in text
        assert "A 13/13" in text

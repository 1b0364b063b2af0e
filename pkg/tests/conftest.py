from pathlib import Path

import pytest

from fairgauge import autoeval, harvest, hybrid, manual, report
from fairgauge.registry import builtin_registry

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "fairgauge" / "fixtures"
PRE = FIXTURES / "xplacer-pre"
POST = FIXTURES / "xplacer-post"
UVM_ROW = FIXTURES / "uvm-row"
TREES = FIXTURES / "trees"
STAMP = "2023-11-14T22:13:20Z"


@pytest.fixture(autouse=True)
def _hermetic(monkeypatch):
    monkeypatch.delenv(autoeval.CONFIG_ENV, raising=False)
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


@pytest.fixture
def registry():
    return builtin_registry()


def run_auto(path):
    target = harvest.load_target(str(path))
    graph = harvest.harvest(target, offline=True)
    return target, graph, autoeval.evaluate_metrics(graph, target, harvested_at=STAMP)


def run_hybrid(path, *, overrides=True, exclude_na=False):
    target, _, auto = run_auto(path)
    answers = manual.parse_answers(path / "answers.txt")
    ovs = hybrid.read_overrides(path / "overrides.txt") if overrides and (path / "overrides.txt").exists() else []
    outcomes = hybrid.merge(answers, auto, builtin_registry(), ovs)
    return report.build_report(target.identifier, auto.harvested_at, outcomes, overrides=ovs, exclude_na=exclude_na)


@pytest.fixture(scope="session")
def post_report():
    return run_hybrid(POST)


@pytest.fixture(scope="session")
def pre_report():
    return run_hybrid(PRE)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

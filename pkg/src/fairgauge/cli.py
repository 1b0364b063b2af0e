"""``fairgauge`` command-line interface.

Exit codes: 0 success, 1 usage error, 2 evaluation or domain error.
Diagnostics go to stderr; artifacts go to files or stdout.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import annotate, autoeval, harvest, hybrid, manual, report, treemodel
from .errors import FairGaugeError
from .linkeddata import serialize_linked_data, serialize_ntriples
from .registry import builtin_registry

log = logging.getLogger("fairgauge")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _write(data: bytes | str, path: str | None) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(path).write_bytes(data)
        log.info("wrote %s", path)


# -- registry --------------------------------------------------------------------

def cmd_registry_list(args) -> int:
    reg = builtin_registry()
    if args.json:
        rows = [
            {
                "id": i.id,
                "dual_partner": i.dual_partner,
                "principle": i.principle.sub,
                "mode": i.mode.value,
                "target": i.target,
                "description": i.description,
            }
            for i in reg
        ]
        _write(json.dumps(rows, indent=2) + "\n", None)
    else:
        for i in reg:
            print(f"{i.label:<28} {i.principle.sub:<5} {i.mode.value:<13} {i.description}")
    return 0


# -- assess ----------------------------------------------------------------------

def _auto(args):
    config = autoeval.load_config(args.config)
    target = harvest.load_target(args.target, offline=args.no_network)
    graph = harvest.harvest(target, offline=args.no_network)
    target = harvest.with_harvested_files(target, graph)
    return target, config, autoeval.evaluate_metrics(graph, target, config)


def cmd_assess_auto(args) -> int:
    _, _, auto = _auto(args)
    _write(json.dumps(auto.to_dict(), indent=2) + "\n", args.json)
    for r in auto.results.values():
        log.info("%-14s %s", r.metric_id, r.status.value)
    return 0


def _ask(prompt: str) -> str:
    # prompts belong with diagnostics so stdout stays a clean artifact stream
    sys.stderr.write(prompt)
    sys.stderr.flush()
    return input()


def _load_answers(args, subject: str = "") -> manual.AnswerSet:
    reg = builtin_registry()
    if getattr(args, "interactive", False):
        existing = manual.parse_answers(args.existing) if args.existing else None
        answers = manual.interactive_fill(
            reg, existing, input_fn=_ask, out_path=args.out, subject=subject or None
        )
    else:
        answers = manual.parse_answers(args.answers, reg)
    for f in manual.validate_answers(answers, reg, strict=not args.lenient):
        print(f"{f.severity}: {f.indicator_id}: {f.message}", file=sys.stderr)
    return manual.effective_answers(answers, reg)


def cmd_assess_manual(args) -> int:
    answers = _load_answers(args)
    if not (args.interactive and args.out):  # interactive runs already wrote --out
        _write(manual.serialize_answers(answers), args.out)
    return 0


def cmd_assess_hybrid(args) -> int:
    target, config, auto = _auto(args)
    answers = _load_answers(args, target.identifier)
    overrides = [hybrid.parse_override(text) for text in args.override]
    for path in args.overrides:
        overrides += hybrid.read_overrides(path)
    outcomes = hybrid.merge(answers, auto, builtin_registry(), overrides)
    doc = report.build_report(
        target.identifier,
        auto.harvested_at,
        outcomes,
        overrides=overrides,
        config_digests={"eval_config": config.digest},
        exclude_na=args.exclude_na,
    )
    if args.json:
        _write(report.render_json(doc), args.json)
    if args.svg:
        _write(report.render_svg(doc), args.svg)
    if args.text:
        _write(report.render_text(doc), None)
    elif not args.json:
        _write(report.render_json(doc), None)
    print(f"FAIR score: {doc.score.percent}%", file=sys.stderr)
    return 0


# -- annotate / tree ---------------------------------------------------------------

def _serialize(doc, fmt: str) -> bytes:
    return serialize_ntriples(doc) if fmt == "nt" else serialize_linked_data(doc)


def cmd_annotate_csv(args) -> int:
    mapping = annotate.parse_mapping(args.mapping)
    doc = annotate.annotate_csv(args.csv, mapping)
    _write(_serialize(doc, args.format), args.output)
    return 0


def cmd_annotate_tree(args) -> int:
    tree = treemodel.parse_tree(args.tree)
    doc = treemodel.annotate_tree(tree, args.base)
    _write(_serialize(doc, args.format), args.output)
    return 0


def cmd_tree_eval(args) -> int:
    tree = treemodel.load_any(args.tree)
    try:
        features = treemodel.parse_features(args.features)
    except (ValueError, ArithmeticError) as exc:
        raise UsageError(f"--features: {exc}") from exc
    print(treemodel.evaluate(tree, features))
    return 0


# -- report ----------------------------------------------------------------------

def cmd_report(args) -> int:
    doc = report.parse_report(Path(args.result).read_bytes())
    if args.svg:
        _write(report.render_svg(doc), args.svg)
    if args.text or not args.svg:
        _write(report.render_text(doc), None)
    return 0


# -- parser ----------------------------------------------------------------------

def _target_options(p) -> None:
    p.add_argument("target", help="URL, fixture directory or manifest file")
    p.add_argument("--config", help="evaluation config (default: $FAIRGAUGE_CONFIG or built-in)")
    p.add_argument("--no-network", action="store_true", help="forbid live fetches")


def _answer_options(p, required: bool) -> None:
    p.add_argument("--answers", required=required, help="answer file: '<id> <level> [# note]' per line")
    p.add_argument("--lenient", action="store_true", help="default missing answers to level 1")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fairgauge", description="Hybrid FAIRness assessment and HPC data annotation.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    reg = sub.add_parser("registry", help="inspect the indicator registry")
    reg_sub = reg.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = reg_sub.add_parser("list", help="list the 47 scoring indicators")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_registry_list)

    assess = sub.add_parser("assess", help="run an assessment")
    a_sub = assess.add_subparsers(dest="mode", required=True, parser_class=_Parser)

    p = a_sub.add_parser("auto", help="automated metrics only")
    _target_options(p)
    p.add_argument("--json", metavar="OUT", help="write the metric report here (default stdout)")
    p.set_defaults(func=cmd_assess_auto)

    p = a_sub.add_parser("manual", help="validate or collect manual answers")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--answers", help="answer file to validate")
    src.add_argument("--interactive", action="store_true", help="prompt for each manual indicator")
    p.add_argument("--existing", help="answer file used as defaults for --interactive")
    p.add_argument("--out", help="where to write the answer file")
    p.add_argument("--lenient", action="store_true", help="default missing answers to level 1")
    p.set_defaults(func=cmd_assess_manual)

    p = a_sub.add_parser("hybrid", help="automated metrics plus manual answers")
    _target_options(p)
    _answer_options(p, required=True)
    p.add_argument("--override", action="append", default=[], metavar="'METRIC=pass|fail: WHY'")
    p.add_argument("--overrides", action="append", default=[], metavar="FILE", help="file of override lines")
    p.add_argument("--exclude-na", action="store_true", help="drop not-applicable indicators from the score")
    p.add_argument("--json", metavar="OUT", help="write the report JSON here")
    p.add_argument("--svg", metavar="OUT", help="write the maturity chart here")
    p.add_argument("--text", action="store_true", help="print a text summary")
    p.set_defaults(func=cmd_assess_hybrid)

    ann = sub.add_parser("annotate", help="produce linked-data annotations")
    ann_sub = ann.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    p = ann_sub.add_parser("csv", help="annotate CSV rows with a mapping spec")
    p.add_argument("csv")
    p.add_argument("--mapping", required=True)
    p.add_argument("--format", choices=("jsonld", "nt"), default="jsonld")
    p.add_argument("-o", "--out", "--output", dest="output", metavar="OUT")
    p.set_defaults(func=cmd_annotate_csv)
    p = ann_sub.add_parser("tree", help="annotate a decision tree")
    p.add_argument("tree")
    p.add_argument("--base", default=treemodel.DEFAULT_BASE, help="base IRI for tree nodes")
    p.add_argument("--format", choices=("jsonld", "nt"), default="jsonld")
    p.add_argument("-o", "--out", "--output", dest="output", metavar="OUT")
    p.set_defaults(func=cmd_annotate_tree)

    tree = sub.add_parser("tree", help="decision tree tools")
    t_sub = tree.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = t_sub.add_parser("eval", help="classify one feature vector")
    p.add_argument("tree", help="native tree JSON or annotated JSON-LD")
    p.add_argument("--features", required=True, help="k=v,k2=v2")
    p.set_defaults(func=cmd_tree_eval)

    p = sub.add_parser("report", help="render a saved hybrid report")
    p.add_argument("result")
    p.add_argument("--svg", metavar="OUT")
    p.add_argument("--text", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s: %(message)s",
            stream=sys.stderr,
            force=True,
        )
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except FairGaugeError as exc:
        print(f"fairgauge: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"fairgauge: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())

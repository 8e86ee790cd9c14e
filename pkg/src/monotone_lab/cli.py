"""Command line interface.

Subcommands: run (scenario file), gap, fitz, classify, br, tail.  The
inline subcommands accept JSON descriptors on the command line and are
thin wrappers that synthesize a one-task scenario.  Exit codes: 0 when
every task ran (verdicts may still be negative), 2 on parse or
configuration errors, 3 on an internal solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .harness import (
    ScenarioError,
    parse_scenario,
    report_csv,
    report_json,
    run_scenario,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _json_arg(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc.msg}") from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="monotone-lab",
        description="numerical analysis toolkit for monotone operators",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a scenario file")
    run_p.add_argument("scenario", help="path to a scenario JSON file")
    _common_output(run_p)

    for name, help_text in (
        ("gap", "gap evaluation at probe points"),
        ("fitz", "Fitzpatrick values and extension membership"),
        ("classify", "operator class checks"),
        ("br", "approximate-minimizer subgradient procedures"),
        ("tail", "tail truncation experiment"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--space", type=_json_arg, default={"dim": 1,
                                                           "norm": "l2"},
                       help='space descriptor, e.g. \'{"dim":2,"norm":"l2"}\'')
        if name in ("gap", "fitz", "classify"):
            p.add_argument("--operator", type=_json_arg, required=True,
                           help="operator descriptor (JSON)")
        p.add_argument("--task", type=_json_arg, default={},
                       help="extra task fields (JSON object)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget", type=int, default=None)
        p.add_argument("--eta", type=float, default=None)
        if name == "gap":
            p.add_argument("--probes", type=_json_arg, default=None,
                           help="probe list [[x, xstar], ...] (JSON)")
            p.add_argument("--count", type=int, default=20,
                           help="seeded probe count when none are given")
        if name == "fitz":
            p.add_argument("--points", type=_json_arg, required=True,
                           help="probe list [[ystar, ystarstar], ...]")
        if name == "classify":
            p.add_argument("--class", dest="cls", required=True,
                           choices=["fpv", "fp", "ni", "strongmax"])
        if name == "br":
            p.add_argument("--mode", required=True,
                           choices=["point", "corollary", "van", "witness"])
            p.add_argument("--fn", type=_json_arg, required=True,
                           help="function descriptor (JSON)")
        if name == "tail":
            p.add_argument("--n-list", type=_json_arg, default=[1, 2, 4, 8,
                                                                16])
        _common_output(p)
    return ap


def _common_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="write the report here "
                                               "instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def _inline_scenario(args: argparse.Namespace) -> dict:
    task = dict(args.task)
    task["seed"] = task.get("seed", args.seed)
    if args.budget is not None:
        task["budget"] = args.budget
    if args.eta is not None:
        task["eta"] = args.eta
    operators = {}
    if getattr(args, "operator", None) is not None:
        operators["op"] = args.operator
        task["operator"] = "op"

    if args.command == "gap":
        task["kind"] = "gap"
        if args.probes is not None:
            task["probes"] = args.probes
        else:
            task.setdefault("count", args.count)
    elif args.command == "fitz":
        task["kind"] = "fitz"
        task["points"] = args.points
    elif args.command == "classify":
        task["kind"] = "classify"
        task["class"] = args.cls
    elif args.command == "br":
        task["kind"] = "br"
        task["mode"] = args.mode
        task["fn"] = args.fn
    elif args.command == "tail":
        task["kind"] = "tail_experiment"
        task.setdefault("n_list", args.n_list)
        args.space = {"dim": 1, "norm": "l1"}
    return {
        "schema": 1,
        "space": args.space,
        "operators": operators,
        "tasks": [task],
    }


def _emit(report: dict, args: argparse.Namespace) -> None:
    text = report_json(report) if args.format == "json" else \
        report_csv(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        print(text)


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "run":
            report = run_scenario(args.scenario)
        else:
            data = _inline_scenario(args)
            # validate before running so config errors exit with 2
            parse_scenario(data)
            import json as _json
            import tempfile

            with tempfile.NamedTemporaryFile(
                "w", suffix=".json", delete=False, encoding="utf-8"
            ) as fh:
                _json.dump(data, fh)
                tmp = fh.name
            report = run_scenario(tmp)
            report["scenario"] = "<inline>"
        _emit(report, args)
        return EXIT_OK
    except (ScenarioError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # internal solver panic
        print(f"internal error: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())

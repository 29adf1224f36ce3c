"""Command line entry point: ``adams-calc eval|verify|report``."""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, default_config, load_config
from .evaluate import EvalError, render
from .parser import ParseError
from .tasks import format_text, report_from_json, run_all, serialize_report


def _config(path):
    return load_config(path) if path else default_config()


def cmd_eval(args) -> int:
    try:
        cfg = _config(args.config)
        value = cfg.evaluator(args.space)(args.expr)
    except (ConfigError, EvalError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json and hasattr(value, "to_json"):
        print(json.dumps(value.to_json()))
    else:
        print(render(value))
    return 0


def _emit(reports, fmt: str, out):
    for r in reports:
        print(serialize_report(r) if fmt == "json" else format_text(r), file=out)


def cmd_verify(args) -> int:
    try:
        cfg = _config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    reports = run_all(cfg, args.task)
    if args.output:
        with open(args.output, "w") as fh:
            _emit(reports, "json", fh)
    _emit(reports, args.format, sys.stdout)
    return 0 if all(r.ok for r in reports) else 1


def cmd_report(args) -> int:
    with open(args.input) if args.input != "-" else sys.stdin as fh:
        reports = [report_from_json(line) for line in fh if line.strip()]
    _emit(reports, args.format, sys.stdout)
    return 0 if all(r.ok for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adams-calc",
                                description="Exact Adams operation / Riemann-Roch calculus")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate an expression on a space")
    e.add_argument("expr")
    e.add_argument("--space", required=True)
    e.add_argument("--config")
    e.add_argument("--json", action="store_true", help="print the value as JSON")
    e.set_defaults(func=cmd_eval)

    v = sub.add_parser("verify", help="run verification tasks")
    v.add_argument("task", nargs="?", default="all", help="task id, task kind or 'all'")
    v.add_argument("--config")
    v.add_argument("--format", choices=("json", "text"), default="json")
    v.add_argument("--output", help="also write JSON reports to this file")
    v.set_defaults(func=cmd_verify)

    va = sub.add_parser("verify-all", help="run every task of the configuration")
    va.add_argument("--config")
    va.add_argument("--format", choices=("json", "text"), default="json")
    va.add_argument("--output", help="also write JSON reports to this file")
    va.set_defaults(func=cmd_verify, task="all")

    r = sub.add_parser("report", help="re-render a JSON-lines report file")
    r.add_argument("input", nargs="?", default="-")
    r.add_argument("--format", choices=("json", "text"), default="text")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

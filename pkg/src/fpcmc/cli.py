"""Command-line front end: ``check``, ``witness`` and ``selftest``."""

from __future__ import annotations

import argparse
import os
import sys

from . import encode as E
from . import fpc as F
from . import golden
from .kernel import DEFAULT_DEPTH, InvariantViolation, check, show_sequent
from .syntax import ParseError
from .terms import ArityError
from .witness import certificate

ACCEPTED, REJECTED, BAD_INPUT, EXHAUSTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _problem(path: str) -> E.ProblemFile:
    if os.path.exists(path):
        return E.load_problem(path)
    bundled = golden.DATA / os.path.basename(path)
    if bundled.is_file():
        return golden.load(os.path.basename(path))
    raise UsageError(f"no such problem file: {path}")


def _cert_text(arg: str) -> str:
    if not arg.lstrip().startswith("(") and os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


def cmd_check(args, out=None) -> int:
    out = out or sys.stdout
    pf = _problem(args.problem)
    claim = E.parse_claim(args.goal)
    cert = F.parse_cert(_cert_text(args.cert), allow_negdia=claim.kind != "unsim")
    name = args.table or golden.TABLE_FOR[claim.kind]
    if name not in F.TABLES:
        raise UsageError(f"unknown table {name!r}; choose from {', '.join(F.TABLES)}")
    if args.depth < 1:
        raise UsageError("--depth must be at least 1")
    result = check(F.TABLES[name](), cert, E.goal(claim, pf.problem), depth=args.depth)
    if args.trace != "none":
        for step in result.trace:
            print(step.line(), file=out)
            if args.trace == "full":
                print("    " + show_sequent(step.sequent), file=out)
    verdict = {"accepted": ACCEPTED, "rejected": REJECTED, "exhausted": EXHAUSTED}[result.status]
    label = "resource exhausted" if result.status == "exhausted" else result.status
    print(f"{claim}: {label}", file=out)
    return verdict


def cmd_witness(args, out=None) -> int:
    out = out or sys.stdout
    pf = _problem(args.problem)
    claim = E.parse_claim(args.goal)
    E.goal(claim, pf.problem)  # validates kinds and constants
    cert = certificate(claim, pf.problem)
    if cert is None:
        print("claim is false", file=out)
        return REJECTED
    print(cert, file=out)
    return ACCEPTED


def cmd_selftest(args=None, out=None, tables=None) -> int:
    out = out or sys.stdout
    failures = 0
    for case in golden.POSITIVE + golden.NEGATIVE:
        try:
            ok = golden.run(case, tables).accepted == case.accept
        except Exception as e:  # a broken table must show up as a failure, not a crash
            ok = False
            print(f"  error: {type(e).__name__}: {e}", file=out)
        failures += not ok
        want = "accept" if case.accept else "reject"
        print(f"{'PASS' if ok else 'FAIL'}  {case.name}  (expected {want})", file=out)
    try:
        F.parse_cert("(hml (not (dia a tt)))", allow_negdia=False)
        ok = False
    except ParseError:
        ok = True
    failures += not ok
    print(f"{'PASS' if ok else 'FAIL'}  negated diamond refused under unsim", file=out)
    print(f"{failures} failure(s)", file=out)
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fpcmc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check a certificate against a claim")
    c.add_argument("--problem", required=True, help="problem file (or a bundled name)")
    c.add_argument("--goal", required=True, help='claim such as "reach a c"')
    c.add_argument("--cert", required=True, help="certificate text or a file holding it")
    c.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help="rule applications per branch")
    c.add_argument("--trace", choices=("none", "rules", "full"), default="none")
    c.add_argument("--table", help="override the table chosen from the claim kind")
    c.set_defaults(run=cmd_check)

    w = sub.add_parser("witness", help="generate a certificate for a claim")
    w.add_argument("--problem", required=True)
    w.add_argument("--goal", required=True)
    w.set_defaults(run=cmd_witness)

    s = sub.add_parser("selftest", help="run the bundled reference examples")
    s.set_defaults(run=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return BAD_INPUT if e.code else 0
    try:
        return args.run(args)
    except (UsageError, ParseError, E.ProblemError, ArityError, InvariantViolation, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

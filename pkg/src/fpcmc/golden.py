"""Reference problems and their expected verdicts, shared by ``selftest`` and the tests."""

from __future__ import annotations

from dataclasses import dataclass
from importlib.resources import files

from . import encode as E
from . import fpc as F
from .kernel import Result, check
from .syntax import parse_formula

DATA = files("fpcmc") / "data"

INV_BD = ("(inv (lam (x y) (imp (or (and+ (= x b) (= y d)) (and+ (= x c) (= y d))) false-))"
          " (bipole 1))")
COINV_21_23 = "(coinv (lam (x y) (or (and+ (= x 21) (= y 23)) (and+ (= x 22) (= y 24)))) (bipole 1))"
COINV_21_25 = "(coinv (lam (x y) (and+ (= x 21) (= y 25))) (bipole 1))"

SUBSET = "(forall (x) (imp (or (= x 1) (= x 3)) (or (= x 1) (= x 2) (= x 3))))"
SUBSET_MISSING = "(forall (x) (imp (or (= x 1) (= x 4)) (or (= x 1) (= x 2) (= x 3))))"
SUBSET_SWAPPED = "(forall (x) (imp (or (= x 1) (= x 2) (= x 3)) (or (= x 1) (= x 3))))"

#: table chosen for each claim kind
TABLE_FOR = {
    "reach": "reach", "unreach": "nonreach", "sim": "sim", "bisim": "sim",
    "unsim": "nonsim", "unbisim": "nonbisim",
}


@dataclass(frozen=True)
class Case:
    problem: str      # bundled file name, or "" for a bare formula
    goal: str         # claim, or formula text when problem == ""
    cert: str
    accept: bool

    @property
    def name(self) -> str:
        where = self.problem or "formula"
        return f"{where}: {self.goal} with {self.cert}"


POSITIVE = [
    Case("abcd.graph", "reach a c", "(path (b))", True),
    Case("abcd.graph", "reach a c", "(path (b c b))", True),
    Case("abcd.graph", "unreach d a", "(async stop)", True),
    Case("abcd.graph", "unreach b d", INV_BD, True),
    Case("branching.lts", "sim 1 6", "decproc", True),
    Case("branching.lts", "unsim 6 1", "(hml (dia a (and (dia b tt) (dia c tt))))", True),
    Case("branching.lts", "unbisim 6 10", "(hml (dia a (not (dia b tt))))", True),
    Case("loops.lts", "sim 21 23", COINV_21_23, True),
    Case("", SUBSET, "decproc", True),
]

NEGATIVE = [
    Case("abcd.graph", "reach a c", "(path (c))", False),
    Case("abcd.graph", "unreach a d", INV_BD, False),
    Case("branching.lts", "unsim 6 1", "(hml (dia a tt))", False),
    Case("branching.lts", "unbisim 6 6", "(hml (dia a (not (dia b tt))))", False),
    Case("branching.lts", "unbisim 6 6", "(hml (dia a (and (dia b tt) (dia c tt))))", False),
    Case("branching.lts", "unbisim 6 6", "(hml tt)", False),
    Case("loops.lts", "sim 21 25", COINV_21_25, False),
    Case("", SUBSET_MISSING, "decproc", False),
    Case("", SUBSET_SWAPPED, "decproc", False),
]


def load(name: str) -> E.ProblemFile:
    return E.parse_problem((DATA / name).read_text(encoding="utf-8"))


def run(case: Case, tables=None, depth: int | None = None) -> Result:
    tables = tables or F.TABLES
    kw = {} if depth is None else {"depth": depth}
    if not case.problem:
        return check(tables["common"](), F.parse_cert(case.cert), parse_formula(case.goal), **kw)
    claim = E.parse_claim(case.goal)
    problem = load(case.problem).problem
    cert = F.parse_cert(case.cert, allow_negdia=claim.kind != "unsim")
    return check(tables[TABLE_FOR[claim.kind]](), cert, E.goal(claim, problem), **kw)

"""Graphs and labelled transition systems as fixed-point formulas.

Edges and transitions become purely positive disjunctions of equalities;
reachability is a least fixed point over them, (bi)simulation a greatest
one.  Negated claims are written ``A imp false-``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .terms import (
    FALSE_NEG, AndNeg, AndPos, Body, BVar, Const, Eq, Exists, Forall, Formula, Imp, Mu,
    Nu, PredApp, PVar, conj_pos, disj,
)


class ProblemError(ValueError):
    pass


@dataclass
class Graph:
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)

    def __post_init__(self):
        for u, v in self.edges:
            for n in (u, v):
                if n not in self.nodes:
                    self.nodes.append(n)

    def succ(self, x) -> list:
        return [v for u, v in self.edges if u == x]


@dataclass
class Lts:
    states: list = field(default_factory=list)
    labels: list = field(default_factory=list)
    trans: list = field(default_factory=list)

    def __post_init__(self):
        for p, a, q in self.trans:
            for s in (p, q):
                if s not in self.states:
                    self.states.append(s)
            if a not in self.labels:
                self.labels.append(a)

    def succ(self, p, a=None) -> list:
        return [q for s, b, q in self.trans if s == p and (a is None or b == a)]

    def moves(self, p) -> list:
        return [(b, q) for s, b, q in self.trans if s == p]


KINDS = ("reach", "unreach", "sim", "unsim", "bisim", "unbisim")


@dataclass(frozen=True)
class Claim:
    kind: str
    left: str
    right: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ProblemError(f"unknown claim kind {self.kind!r}")

    @property
    def negative(self) -> bool:
        return self.kind.startswith("un")

    @property
    def positive_kind(self) -> str:
        return self.kind[2:] if self.negative else self.kind

    def __str__(self):
        return f"{self.kind} {self.left} {self.right}"


def parse_claim(text: str) -> Claim:
    parts = text.split()
    if len(parts) != 3:
        raise ProblemError(f"a goal is '<kind> <x> <y>', got {text!r}")
    return Claim(*parts)


# ---------------------------------------------------------------------------
# encoders

def _c(name) -> Const:
    return Const(str(name))


def encode_step(g: Graph) -> Body:
    """``lam x y. OR (x=u and+ y=v)`` over the edges."""
    x, y = BVar(1), BVar(0)
    return Body(2, disj(*(AndPos(Eq(x, _c(u)), Eq(y, _c(v))) for u, v in g.edges)),
                "step", ("x", "y"))


def step(g: Graph, s, t) -> Mu:
    return Mu(encode_step(g), (s, t))


def encode_path(g: Graph) -> Body:
    """``lam P x z. step x z or exists y. step x y and+ P y z``."""
    sb = encode_step(g)
    base = Mu(sb, (BVar(1), BVar(0)))
    # under the existential: y = 0, z = 1, x = 2
    hop = Exists(AndPos(Mu(sb, (BVar(2), BVar(0))), PredApp(PVar(0), (BVar(0), BVar(1)))), "y")
    return Body(2, disj(base, hop), "path", ("x", "z"))


def path(g: Graph, s, t) -> Mu:
    return Mu(encode_path(g), (_term(s), _term(t)))


def encode_one(l: Lts) -> Body:
    """``lam p a q. OR (p=u and+ a=v and+ q=w)`` over the transitions."""
    p, a, q = BVar(2), BVar(1), BVar(0)
    return Body(3, disj(*(conj_pos(Eq(p, _c(u)), Eq(a, _c(v)), Eq(q, _c(w)))
                          for u, v, w in l.trans)), "one", ("p", "a", "q"))


def _clause(l: Lts, swap: bool) -> Formula:
    # forall a p'. one p a p' imp exists q'. one q a q' and+ S p' q'
    ob = encode_one(l)
    # the moving process is bound at depth 1 or 0 of the body
    mover, other = (0, 1) if swap else (1, 0)
    # under forall a, forall p': p' = 0, a = 1, params shifted by 2
    ante = Mu(ob, (BVar(mover + 2), BVar(1), BVar(0)))
    # under the extra exists q': q' = 0, p' = 1, a = 2, params shifted by 3
    resp = Mu(ob, (BVar(other + 3), BVar(2), BVar(0)))
    # S p' q' (resp. B q' p'): the universally bound successor comes first
    co = PredApp(PVar(0), (BVar(1), BVar(0)), False)
    names = ("q'", "p'") if swap else ("p'", "q'")
    return Forall(Forall(Imp(ante, Exists(AndPos(resp, co), names[1])), names[0]), "a")


def encode_sim(l: Lts) -> Body:
    return Body(2, _clause(l, False), "sim", ("p", "q"))


def encode_bisim(l: Lts) -> Body:
    return Body(2, AndNeg(_clause(l, False), _clause(l, True)), "bisim", ("p", "q"))


def _term(x) -> Const:
    return x if isinstance(x, Const) else _c(x)


def sim(l: Lts, p, q) -> Nu:
    return Nu(encode_sim(l), (_term(p), _term(q)))


def bisim(l: Lts, p, q) -> Nu:
    return Nu(encode_bisim(l), (_term(p), _term(q)))


def neg(f: Formula) -> Formula:
    return Imp(f, FALSE_NEG)


Problem = Union[Graph, Lts]


def goal(c: Claim, problem: Problem) -> Formula:
    if isinstance(problem, Graph):
        if c.positive_kind != "reach":
            raise ProblemError(f"{c.kind} needs a transition system, not a graph")
        universe = problem.nodes
        base = path(problem, c.left, c.right)
    else:
        if c.positive_kind == "reach":
            raise ProblemError(f"{c.kind} needs a graph, not a transition system")
        universe = problem.states
        make = sim if c.positive_kind == "sim" else bisim
        base = make(problem, c.left, c.right)
    for x in (c.left, c.right):
        if x not in universe:
            raise ProblemError(f"unknown constant {x!r}")
    return neg(base) if c.negative else base


# ---------------------------------------------------------------------------
# problem files


@dataclass
class ProblemFile:
    problem: Problem
    goals: list


def parse_problem(text: str) -> ProblemFile:
    """Read the line-oriented problem format.

    ``node n`` / ``edge u v`` describe a graph, ``state s`` / ``label a`` /
    ``trans p a q`` a transition system; goal lines name a claim.
    """
    nodes, edges, states, labels, trans, goals = [], [], [], [], [], []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, *args = line.split()
        want = {"node": 1, "edge": 2, "state": 1, "label": 1, "trans": 3}.get(word)
        if want is not None and len(args) != want:
            raise ProblemError(f"line {no}: {word} takes {want} arguments")
        if word == "node":
            nodes.append(args[0])
        elif word == "edge":
            edges.append(tuple(args))
        elif word == "state":
            states.append(args[0])
        elif word == "label":
            labels.append(args[0])
        elif word == "trans":
            trans.append(tuple(args))
        elif word in KINDS:
            if len(args) != 2:
                raise ProblemError(f"line {no}: {word} takes 2 arguments")
            goals.append(Claim(word, *args))
        else:
            raise ProblemError(f"line {no}: unknown directive {word!r}")
    is_graph = bool(nodes or edges)
    if is_graph and (states or labels or trans):
        raise ProblemError("a problem is either a graph or a transition system")
    problem = Graph(_dedup(nodes), _dedup(edges)) if is_graph else \
        Lts(_dedup(states), _dedup(labels), _dedup(trans))
    return ProblemFile(problem, goals)


def load_problem(path) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


def _dedup(xs: list) -> list:
    return list(dict.fromkeys(xs))

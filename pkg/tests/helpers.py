"""Generators, independent oracles and certificate mutations for the tests."""

from __future__ import annotations

import itertools
import random

from hypothesis import strategies as st

from fpcmc import encode as E
from fpcmc import fpc as F
from fpcmc.kernel import check, erase, phase_switch_violations
from fpcmc.terms import FALSE_POS, Const, EigenVar, FalsePos, Imp, LogicVar, Or
from fpcmc.validate import errors

LABELS = ("a", "b", "c")

# ---------------------------------------------------------------------------
# random problems


def random_graph(rng: random.Random, max_nodes: int = 8) -> E.Graph:
    n = rng.randint(1, max_nodes)
    nodes = [f"n{i}" for i in range(n)]
    p = rng.choice((0.1, 0.2, 0.35))
    edges = [(u, v) for u in nodes for v in nodes if rng.random() < p]
    return E.Graph(nodes, edges)


def random_lts(rng: random.Random, max_states: int = 8, max_labels: int = 3) -> E.Lts:
    n = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n)]
    labels = list(LABELS[:rng.randint(1, max_labels)])
    p = rng.choice((0.05, 0.1, 0.2))
    trans = [(x, a, y) for x in states for a in labels for y in states if rng.random() < p]
    return E.Lts(states, labels, trans)


@st.composite
def graphs(draw, max_nodes: int = 8):
    n = draw(st.integers(1, max_nodes))
    nodes = [f"n{i}" for i in range(n)]
    edges = draw(st.lists(st.tuples(st.sampled_from(nodes), st.sampled_from(nodes)),
                          max_size=2 * n, unique=True))
    return E.Graph(nodes, edges)


@st.composite
def ltss(draw, max_states: int = 6, max_labels: int = 3):
    n = draw(st.integers(1, max_states))
    states = [f"s{i}" for i in range(n)]
    labels = list(LABELS[:draw(st.integers(1, max_labels))])
    trans = draw(st.lists(st.tuples(st.sampled_from(states), st.sampled_from(labels),
                                    st.sampled_from(states)), max_size=2 * n, unique=True))
    return E.Lts(states, labels, trans)


# ---------------------------------------------------------------------------
# oracles


def closure(g: E.Graph) -> set:
    """Pairs joined by a non-empty path (Floyd-Warshall)."""
    idx = {v: i for i, v in enumerate(g.nodes)}
    n = len(g.nodes)
    r = [[False] * n for _ in range(n)]
    for u, v in g.edges:
        r[idx[u]][idx[v]] = True
    for k in range(n):
        for i in range(n):
            if r[i][k]:
                for j in range(n):
                    if r[k][j]:
                        r[i][j] = True
    return {(u, v) for u in g.nodes for v in g.nodes if r[idx[u]][idx[v]]}


def path_valid(g: E.Graph, x, nodes, y) -> bool:
    walk = [x, *nodes, y]
    return all((u, v) in set(g.edges) for u, v in zip(walk, walk[1:]))


def inv_valid(g: E.Graph, t, u, pairs) -> bool:
    """``pairs`` hold ``(t,u)``, contain no edge and are closed under predecessors' moves."""
    ps = set(pairs)
    if (t, u) not in ps:
        return False
    return all((x, y) not in set(g.edges) and all((z, y) in ps for z in g.succ(x))
               for x, y in ps)


def is_simulation(l: E.Lts, pairs) -> bool:
    ps = set(pairs)
    return all(any((x2, y2) in ps for y2 in l.succ(y, a)) for x, y in ps for a, x2 in l.moves(x))


def is_bisim_set(l: E.Lts, pairs) -> bool:
    """The closure condition of the encoded bisimulation body (answers land swapped)."""
    ps = set(pairs)
    back = all(any((y2, x2) in ps for x2 in l.succ(x, a)) for x, y in ps for a, y2 in l.moves(y))
    return is_simulation(l, ps) and back


def game(l: E.Lts, p, q, a) -> bool:
    """What an assertion certificate establishes: some conjunct separates ``p`` from ``q``.

    ``<a>A`` separates when some ``a``-move of ``p`` is separated by ``A`` from
    every ``a``-move of ``q``; ``not <a>A`` when the same holds with roles swapped.
    """
    if isinstance(a, F.Hml):
        a = a.body
    if isinstance(a, F.Conj):
        return any(game(l, p, q, i) for i in a.items)
    if isinstance(a, F.NegDia):
        return game(l, q, p, F.Dia(a.label, a.body))
    return any(all(game(l, p2, q2, a.body) for q2 in l.succ(q, a.label))
               for p2 in l.succ(p, a.label))


def similar(l: E.Lts, p, q) -> bool:
    """Naive greatest fixed point, written independently of the generator."""
    rel = set(itertools.product(l.states, l.states))
    while True:
        keep = {(x, y) for x, y in rel
                if all(any((x2, y2) in rel for y2 in l.succ(y, a)) for a, x2 in l.moves(x))}
        if keep == rel:
            return (p, q) in rel
        rel = keep


def bisimilar(l: E.Lts, p, q) -> bool:
    rel = set(itertools.product(l.states, l.states))
    while True:
        keep = {(x, y) for x, y in rel
                if all(any((x2, y2) in rel for y2 in l.succ(y, a)) for a, x2 in l.moves(x))
                and all(any((x2, y2) in rel for x2 in l.succ(x, a)) for a, y2 in l.moves(y))}
        if keep == rel:
            return (p, q) in rel
        rel = keep


# ---------------------------------------------------------------------------
# checking with the soundness gates applied


TABLES = {"reach": F.reach_table(), "unreach": F.nonreach_table(), "sim": F.sim_table(),
          "bisim": F.sim_table(), "unsim": F.nonsim_table(), "unbisim": F.nonbisim_table()}


def verdict(claim: E.Claim, problem, cert, table=None, depth=None):
    """Run the kernel and insist that any accepted trace is a valid, well-switched proof."""
    kw = {} if depth is None else {"depth": depth}
    r = check(table or TABLES[claim.kind], cert, E.goal(claim, problem), **kw)
    if r.accepted:
        assert not phase_switch_violations(r.trace)
        bad = errors(erase(r.trace))
        assert not bad, bad[:3]
    return r


# ---------------------------------------------------------------------------
# mutations


def path_mutations(cert: F.Path):
    for i in range(len(cert.nodes)):
        yield F.Path(cert.nodes[:i] + cert.nodes[i + 1:])


def pairs_of(pred) -> list:
    """Read back the pair list of a hat-encoded (possibly negated) pair predicate."""
    body = pred.body.left if isinstance(pred.body, Imp) else pred.body
    out = []
    while not isinstance(body, FalsePos):
        first, body = (body.left, body.right) if isinstance(body, Or) else (body, FALSE_POS)
        out.append((first.left.right.name, first.right.right.name))
    return out


def relabel(a, path, new):
    """Replace the label of the item reached by ``path`` (indices into conjunctions)."""
    i, rest = path[0], path[1:]
    items = list(a.items)
    it = items[i]
    if rest:
        it = type(it)(it.label, relabel(it.body, rest, new))
    else:
        it = type(it)(new, it.body)
    items[i] = it
    return F.Conj(tuple(items))


def item_paths(a, prefix=()):
    for i, it in enumerate(a.items):
        yield prefix + (i,)
        yield from item_paths(it.body, prefix + (i,))


def label_at(a, path):
    it = a.items[path[0]]
    return it.label if len(path) == 1 else label_at(it.body, path[1:])


def flip_mutations(cert: F.Hml, labels=LABELS):
    for path in item_paths(cert.body):
        old = label_at(cert.body, path)
        for new in labels:
            if new != old:
                yield F.Hml(relabel(cert.body, path, new))


# ---------------------------------------------------------------------------
# terms for the unification tests

SIG = {"a": 0, "b": 0, "f": 1, "g": 2, "h": 2}


def random_term(rng: random.Random, vars_, depth: int = 2):
    if depth == 0 or rng.random() < 0.3:
        if vars_ and rng.random() < 0.5:
            return rng.choice(vars_)
        return Const(rng.choice(("a", "b")))
    name = rng.choice(("f", "g", "h"))
    return Const(name, tuple(random_term(rng, vars_, depth - 1) for _ in range(SIG[name])))


def ref_walk(t, s):
    while isinstance(t, (LogicVar, EigenVar)) and t in s:
        t = s[t]
    return t


def ref_apply(t, s):
    t = ref_walk(t, s)
    if isinstance(t, Const) and t.args:
        return Const(t.name, tuple(ref_apply(a, s) for a in t.args))
    return t


def ref_unify(a, b, s=None):
    """Textbook Robinson unification of logic variables (eigenvariables are constants)."""
    s = dict(s or {})
    a, b = ref_walk(a, s), ref_walk(b, s)
    if a == b:
        return s
    if isinstance(a, LogicVar):
        return None if a in _vars(ref_apply(b, s)) else {**s, a: b}
    if isinstance(b, LogicVar):
        return ref_unify(b, a, s)
    if isinstance(a, Const) and isinstance(b, Const) and a.name == b.name \
            and len(a.args) == len(b.args):
        for x, y in zip(a.args, b.args):
            s = ref_unify(x, y, s)
            if s is None:
                return None
        return s
    return None


def _vars(t) -> set:
    if isinstance(t, LogicVar):
        return {t}
    if isinstance(t, Const):
        return set().union(*(_vars(a) for a in t.args)) if t.args else set()
    return set()


def match(pattern, target, s=None):
    """One-way matching: a substitution ``s`` on pattern variables with ``s(pattern) == target``."""
    s = dict(s or {})
    if isinstance(pattern, LogicVar):
        if pattern in s:
            return s if s[pattern] == target else None
        return {**s, pattern: target}
    if isinstance(pattern, Const) and isinstance(target, Const) and pattern.name == target.name \
            and len(pattern.args) == len(target.args):
        for x, y in zip(pattern.args, target.args):
            s = match(x, y, s)
            if s is None:
                return None
        return s
    return s if pattern == target else None


def ground_terms(depth: int) -> list:
    out = [Const("a"), Const("b")]
    for _ in range(depth):
        prev = list(out)
        out = [Const("a"), Const("b")]
        out += [Const("f", (x,)) for x in prev]
        out += [Const(n, (x, y)) for n in ("g", "h") for x in prev for y in prev]
    return out

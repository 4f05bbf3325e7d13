"""Certificate generators and semantic oracles.

Nothing here is trusted: generated certificates are only evidence until the
kernel has checked them.
"""

from __future__ import annotations

from collections import deque
from typing import Optional

from .encode import Claim, Graph, Lts
from .fpc import Bipole, CoInv, Conj, Dia, Hml, Inv, NegDia, Path
from .terms import FALSE_NEG, AndPos, BVar, Const, Eq, Imp, PredExpr, disj

# ---------------------------------------------------------------------------
# graphs


def find_path(g: Graph, x, y) -> Optional[Path]:
    """Intermediate nodes of a shortest non-empty path from ``x`` to ``y``."""
    parent = {}
    queue = deque([x])
    while queue:
        v = queue.popleft()
        for w in g.succ(v):
            if w in parent:
                continue
            parent[w] = v
            if w == y:
                nodes = []
                cur = parent[y]
                while cur != x:
                    nodes.append(cur)
                    cur = parent[cur]
                return Path(tuple(reversed(nodes)))
            queue.append(w)
    return None


def reachable(g: Graph, t) -> list:
    """Nodes reachable from ``t`` in zero or more steps, in breadth-first order."""
    seen = [t]
    queue = deque([t])
    while queue:
        for w in g.succ(queue.popleft()):
            if w not in seen:
                seen.append(w)
                queue.append(w)
    return seen


def pairs_pred(pairs, negate: bool = False) -> PredExpr:
    """``lam x y. OR (x=p and+ y=q)``, optionally as ``(..) imp false-``."""
    x, y = BVar(1), BVar(0)
    body = disj(*(AndPos(Eq(x, Const(str(p))), Eq(y, Const(str(q)))) for p, q in pairs))
    return PredExpr(2, Imp(body, FALSE_NEG) if negate else body, ("x", "y"))


def unreach_invariant(g: Graph, t, u) -> PredExpr:
    """The complement of ``T x {u}``, ``T`` being everything reachable from ``t``."""
    return pairs_pred([(v, u) for v in reachable(g, t)], negate=True)


def unreach_certificate(g: Graph, t, u) -> Optional[Inv]:
    if find_path(g, t, u) is not None:
        return None
    return Inv(unreach_invariant(g, t, u), Bipole(1))


# ---------------------------------------------------------------------------
# transition systems


def _states(l1: Lts, l2: Optional[Lts]) -> tuple:
    return l1.states, (l2 or l1).states


def max_simulation(l1: Lts, l2: Optional[Lts] = None) -> set:
    """Largest ``R`` such that ``(p,q) in R`` and ``p -a-> p'`` give ``q -a-> q'`` with ``(p',q') in R``."""
    l2 = l2 or l1
    rel = {(p, q) for p in l1.states for q in l2.states}
    changed = True
    while changed:
        changed = False
        for p, q in sorted(rel):
            ok = all(any((p2, q2) in rel for q2 in l2.succ(q, a)) for a, p2 in l1.moves(p))
            if not ok:
                rel.discard((p, q))
                changed = True
    return rel


def max_bisimulation(l1: Lts, l2: Optional[Lts] = None) -> set:
    """Bisimilarity by partition refinement over the disjoint union."""
    l2 = l2 or l1
    nodes = [(0, s) for s in l1.states] + ([(1, s) for s in l2.states] if l2 is not l1 else [])
    side = {0: l1, 1: l2}
    block = {n: 0 for n in nodes}
    while True:
        sig = {n: frozenset((a, block[(n[0], s2)]) for a, s2 in side[n[0]].moves(n[1]))
               for n in nodes}
        keys = {}
        new = {n: keys.setdefault((block[n], sig[n]), len(keys)) for n in nodes}
        if len(keys) == len(set(block.values())):
            break
        block = new
    tag = 1 if l2 is not l1 else 0
    return {(p, q) for p in l1.states for q in l2.states
            if block[(0, p)] == block[(tag, q)]}


def simulation_pairs(l: Lts, p, q) -> Optional[list]:
    """Pairs reachable from ``(p, q)`` under a maximal-simulation strategy."""
    rel = max_simulation(l)
    if (p, q) not in rel:
        return None
    out = [(p, q)]
    queue = deque(out)
    while queue:
        x, y = queue.popleft()
        for a, x2 in l.moves(x):
            y2 = next(y2 for y2 in l.succ(y, a) if (x2, y2) in rel)
            if (x2, y2) not in out:
                out.append((x2, y2))
                queue.append((x2, y2))
    return out


def bisimulation_pairs(l: Lts, p, q) -> Optional[list]:
    """Like ``simulation_pairs``, answering moves of either side.

    A move of the right process is answered into the pair ``(q', p')``,
    following the argument swap in the second clause of the encoding.
    """
    rel = max_bisimulation(l)
    if (p, q) not in rel:
        return None
    out = [(p, q)]
    queue = deque(out)
    while queue:
        x, y = queue.popleft()
        nxt = [(x2, next(y2 for y2 in l.succ(y, a) if (x2, y2) in rel)) for a, x2 in l.moves(x)]
        nxt += [(y2, next(x2 for x2 in l.succ(x, a) if (x2, y2) in rel)) for a, y2 in l.moves(y)]
        for pair in nxt:
            if pair not in out:
                out.append(pair)
                queue.append(pair)
    return out


def _merge(conjs) -> Conj:
    items = []
    for c in conjs:
        for i in c.items:
            if i not in items:
                items.append(i)
    return Conj(tuple(items))


def distinguishing_assertion(l: Lts, p, q, mode: str = "sim") -> Optional[Conj]:
    """An assertion true of ``p`` and false of ``q``, or ``None`` if none exists.

    It is read off the refinement stage at which ``(p, q)`` drops out of the
    approximants of the (bi)simulation preorder.  In ``sim`` mode only
    diamonds are used; in ``bisim`` mode a failure of ``q``'s moves becomes a
    negated diamond.
    """
    if mode not in ("sim", "bisim"):
        raise ValueError("mode is 'sim' or 'bisim'")
    states = l.states
    rel = {(x, y) for x in states for y in states}
    why: dict = {}
    while (p, q) in rel:
        dropped = {}
        for x, y in rel:
            for a, x2 in l.moves(x):
                ys = l.succ(y, a)
                if all((x2, y2) not in rel for y2 in ys):
                    dropped[(x, y)] = Dia(a, _merge(why[(x2, y2)] for y2 in ys))
                    break
            else:
                if mode == "bisim":
                    for a, y2 in l.moves(y):
                        xs = l.succ(x, a)
                        if all((x2, y2) not in rel for x2 in xs):
                            # (x2, y2) drops out with (y2, x2), so why[(y2, x2)] exists
                            dropped[(x, y)] = NegDia(a, _merge(why[(y2, x2)] for x2 in xs))
                            break
        if not dropped:
            return None
        for pair, item in dropped.items():
            why[pair] = Conj((item,))
        rel -= set(dropped)
    return why[(p, q)]


def hml_eval(l: Lts, s, a) -> bool:
    """``s |= a`` for conjunctions, diamonds and negated diamonds."""
    if isinstance(a, Hml):
        a = a.body
    if isinstance(a, Conj):
        return all(hml_eval(l, s, i) for i in a.items)
    holds = any(hml_eval(l, s2, a.body) for s2 in l.succ(s, a.label))
    return holds if isinstance(a, Dia) else not holds


# ---------------------------------------------------------------------------
# certificates per claim


def certificate(claim: Claim, problem):
    """A certificate for ``claim``, or ``None`` if the claim is false."""
    x, y = claim.left, claim.right
    k = claim.kind
    if k == "reach":
        return find_path(problem, x, y)
    if k == "unreach":
        return unreach_certificate(problem, x, y)
    if k in ("sim", "bisim"):
        pairs = (simulation_pairs if k == "sim" else bisimulation_pairs)(problem, x, y)
        return None if pairs is None else CoInv(pairs_pred(pairs), Bipole(1))
    a = distinguishing_assertion(problem, x, y, "sim" if k == "unsim" else "bisim")
    return None if a is None else Hml(a)

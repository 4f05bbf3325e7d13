"""Certificate formats and their clerk/expert tables.

The common constructors are ``stop``, ``sync``, ``async``, ``bipole n``,
``decproc`` and the (co)invariant carriers ``inv``/``coinv``.  On top of
them sit the evidence-specific formats: explicit paths for reachability and
Hennessy-Milner assertions for non-(bi)similarity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .kernel import FpcTable, Invariant
from .syntax import ParseError, SExp, parse_pred, read, show, show_pred
from .terms import (
    FALSE_NEG, FALSE_POS, TRUE_NEG, TRUE_POS, Const, PredExpr,
)

# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Stop:
    def __str__(self):
        return "stop"


@dataclass(frozen=True)
class Sync:
    k: "Cert"

    def __str__(self):
        return f"(sync {self.k})"


@dataclass(frozen=True)
class Async:
    k: "Cert"

    def __str__(self):
        return f"(async {self.k})"


@dataclass(frozen=True)
class Bipole:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("bipole depth must be non-negative")

    def __str__(self):
        return f"(bipole {self.n})"


@dataclass(frozen=True)
class Decproc:
    def __str__(self):
        return "decproc"


@dataclass(frozen=True)
class Inv:
    pred: PredExpr
    k: "Cert"

    def __str__(self):
        return f"(inv {show_pred(self.pred)} {self.k})"


@dataclass(frozen=True)
class CoInv:
    pred: PredExpr
    k: "Cert"

    def __str__(self):
        return f"(coinv {show_pred(self.pred)} {self.k})"


@dataclass(frozen=True)
class Path:
    nodes: tuple

    def __str__(self):
        return f"(path ({' '.join(self.nodes)}))"


@dataclass(frozen=True)
class Conj:
    items: tuple = ()

    def __str__(self):
        if not self.items:
            return "tt"
        if len(self.items) == 1:
            return str(self.items[0])
        return "(and " + " ".join(map(str, self.items)) + ")"


@dataclass(frozen=True)
class Dia:
    label: str
    body: Conj = Conj()

    def __str__(self):
        return f"(dia {self.label} {self.body})"


@dataclass(frozen=True)
class NegDia:
    label: str
    body: Conj = Conj()

    def __str__(self):
        return f"(not (dia {self.label} {self.body}))"


Item = Union[Dia, NegDia]
TT = Conj()


@dataclass(frozen=True)
class Hml:
    """A root assertion certificate."""

    body: Conj

    def __str__(self):
        return f"(hml {self.body})"


@dataclass(frozen=True)
class Any:
    """Certificate of the permissive table: every question gets every answer."""

    def __str__(self):
        return "any"


Cert = Union[Stop, Sync, Async, Bipole, Decproc, Inv, CoInv, Path, Hml, Conj, Dia, NegDia, Any]

STOP = Stop()
DECPROC = Decproc()
ANY = Any()


def conj(*items: Item) -> Conj:
    return Conj(tuple(items))


def dia(label: str, *items: Item) -> Dia:
    return Dia(label, Conj(tuple(items)))


def negdia(label: str, *items: Item) -> NegDia:
    return NegDia(label, Conj(tuple(items)))


def complement(item: Item) -> Item:
    return NegDia(item.label, item.body) if isinstance(item, Dia) else Dia(item.label, item.body)


def has_negdia(a) -> bool:
    if isinstance(a, Hml):
        return has_negdia(a.body)
    if isinstance(a, Conj):
        return any(has_negdia(i) for i in a.items)
    return isinstance(a, NegDia) or has_negdia(a.body)


def expand(c):
    """One-step unfolding of the derived constructors."""
    if isinstance(c, Bipole):
        return STOP if c.n == 0 else Async(Sync(Bipole(c.n - 1)))
    if isinstance(c, Decproc):
        return Async(Sync(DECPROC))
    return c


def nest(n: int):
    """``n`` explicit ``async (sync ..)`` layers ending in ``stop``."""
    c = STOP
    for _ in range(n):
        c = Async(Sync(c))
    return c


# ---------------------------------------------------------------------------
# surface syntax


def _assertion(s: SExp, allow_neg: bool) -> tuple:
    if s == "tt":
        return ()
    if isinstance(s, list) and s:
        head = s[0]
        if head == "and":
            return tuple(i for x in s[1:] for i in _assertion(x, allow_neg))
        if head == "dia" and len(s) == 3 and isinstance(s[1], str):
            return (Dia(s[1], Conj(_assertion(s[2], allow_neg))),)
        if head == "not" and len(s) == 2:
            inner = _assertion(s[1], allow_neg)
            if len(inner) != 1 or not isinstance(inner[0], Dia):
                raise ParseError("negation applies to a single diamond only")
            if not allow_neg:
                raise ParseError("negated diamonds are not allowed in this certificate")
            return (complement(inner[0]),)
    raise ParseError(f"bad assertion {show(s)}")


def parse_assertion(text: Union[str, SExp], allow_neg: bool = True) -> Conj:
    s = read(text) if isinstance(text, str) else text
    return Conj(_assertion(s, allow_neg))


def _cert(s: SExp, allow_neg: bool):
    if s == "stop":
        return STOP
    if s == "decproc":
        return DECPROC
    if s == "bipole":
        return Bipole(1)
    if s == "any":
        return ANY
    if not isinstance(s, list) or not s or not isinstance(s[0], str):
        raise ParseError(f"bad certificate {show(s)}")
    head, args = s[0], s[1:]
    if head in ("sync", "async") and len(args) == 1:
        k = _cert(args[0], allow_neg)
        return Sync(k) if head == "sync" else Async(k)
    if head == "bipole" and len(args) == 1:
        try:
            n = int(args[0])
        except (TypeError, ValueError):
            raise ParseError("bipole expects a natural number") from None
        if n < 0:
            raise ParseError("bipole expects a natural number")
        return Bipole(n)
    if head in ("inv", "coinv") and len(args) == 2:
        pred = parse_pred(args[0])
        k = _cert(args[1], allow_neg)
        return Inv(pred, k) if head == "inv" else CoInv(pred, k)
    if head == "path" and len(args) == 1:
        nodes = args[0]
        if not isinstance(nodes, list) or not all(isinstance(n, str) for n in nodes):
            raise ParseError("path expects a list of node names")
        return Path(tuple(nodes))
    if head == "hml" and len(args) == 1:
        return Hml(Conj(_assertion(args[0], allow_neg)))
    raise ParseError(f"bad certificate {show(s)}")


def parse_cert(text: Union[str, SExp], allow_negdia: bool = True):
    """Parse a certificate; with ``allow_negdia=False`` negated diamonds are refused."""
    s = read(text) if isinstance(text, str) else text
    return _cert(s, allow_negdia)


# ---------------------------------------------------------------------------
# tables

_SINGLE_CLERKS = ("eq_c", "neq_c", "true_pos_c", "false_neg_c", "and_pos_c", "imp_c",
                  "mu_unfold_l", "nu_unfold_r")
_STORE = ("store_l", "store_r")


def _async_clerks(t: FpcTable, match, keep=lambda c: c):
    """Register the full asynchronous rule set for certificates ``match`` accepts."""
    for rel in _SINGLE_CLERKS:
        t.clause(rel)(lambda c, *_: (keep(c),) if match(c) else ())
    for rel in _STORE:
        t.clause(rel)(lambda c, *_: (keep(c),) if match(c) else ())
    for rel in ("or_c", "and_neg_c"):
        t.clause(rel)(lambda c: ((keep(c), keep(c)),) if match(c) else ())
    for rel in ("exists_c", "forall_c"):
        t.clause(rel)(lambda c: ((lambda y, k=keep(c): k),) if match(c) else ())


def common_table() -> FpcTable:
    t = FpcTable("common")
    is_async = lambda c: isinstance(expand(c), Async)  # noqa: E731
    is_sync = lambda c: isinstance(expand(c), Sync)  # noqa: E731

    # async: every invertible rule, then decide
    _async_clerks(t, is_async, expand)
    for rel in ("decide_l", "decide_r"):
        t.clause(rel)(lambda c, _f: (expand(c).k,) if is_async(c) else ())

    # sync: exhaustive choice, witnesses left to unification, then release
    def sync_pair(c):
        return ((expand(c), expand(c)),) if is_sync(c) else ()

    def sync_branch(c):
        return ((expand(c), 1), (expand(c), 2)) if is_sync(c) else ()

    def sync_witness(c):
        return ((expand(c), None),) if is_sync(c) else ()

    def sync_same(c):
        return (expand(c),) if is_sync(c) else ()

    t.clause("and_pos_e")(sync_pair)
    t.clause("imp_e")(sync_pair)
    t.clause("or_e")(sync_branch)
    t.clause("and_neg_e")(sync_branch)
    t.clause("exists_e")(sync_witness)
    t.clause("forall_e")(sync_witness)
    t.clause("mu_unfold_r")(sync_same)
    t.clause("nu_unfold_l")(sync_same)
    for rel in ("release_l", "release_r"):
        t.clause(rel)(lambda c: (expand(c).k,) if is_sync(c) else ())

    # invariants: the closure premise is left to a bipole
    @t.clause("ind")
    def _ind(c, arity):
        if isinstance(c, Inv) and c.pred.arity == arity:
            yield Invariant(lambda ys: Bipole(1), c.k, c.pred)

    @t.clause("co_ind")
    def _co_ind(c, arity):
        if isinstance(c, CoInv) and c.pred.arity == arity:
            yield Invariant(lambda ys: Bipole(1), c.k, c.pred)

    # carry an invariant through the invertible prefix in front of its fixed point
    is_inv = lambda c: isinstance(c, (Inv, CoInv))  # noqa: E731
    for rel in ("imp_c", "false_neg_c", "true_pos_c", "and_pos_c", "eq_c", "neq_c"):
        t.clause(rel)(lambda c, *_: (c,) if is_inv(c) else ())
    for rel in ("exists_c", "forall_c"):
        t.clause(rel)(lambda c: ((lambda y, k=c: k),) if is_inv(c) else ())
    return t


def reach_table() -> FpcTable:
    t = FpcTable("reach")
    is_path = lambda c: isinstance(c, Path)  # noqa: E731
    for rel in ("store_r", "decide_r"):
        t.clause(rel)(lambda c, _f: (c,) if is_path(c) else ())
    t.clause("mu_unfold_r")(lambda c: (c,) if is_path(c) else ())

    @t.clause("or_e")
    def _or(c):
        if is_path(c):
            yield (c, 2) if c.nodes else (Sync(STOP), 1)

    @t.clause("exists_e")
    def _exists(c):
        if is_path(c) and c.nodes:
            yield Path(c.nodes[1:]), Const(c.nodes[0])

    @t.clause("and_pos_e")
    def _and(c):
        if is_path(c):
            yield Sync(STOP), c

    return common_table().extend(t, "reach")


def nonreach_table() -> FpcTable:
    return common_table().extend(FpcTable(), "nonreach")


def sim_table() -> FpcTable:
    return common_table().extend(FpcTable(), "sim")


def _hml_body(c):
    return c.body if isinstance(c, Hml) else c


def _nonsim_clauses(t: FpcTable, orient_both: bool):
    is_a = lambda c: isinstance(c, (Hml, Conj))  # noqa: E731
    _async_clerks(t, is_a)

    @t.clause("decide_l")
    def _decide(c, _f):
        if not is_a(c):
            return
        items = _hml_body(c).items
        yield from items
        if orient_both and isinstance(c, Hml) and len(items) == 1:
            yield complement(items[0])

    @t.clause("forall_e")
    def _forall(c):
        if isinstance(c, Dia):
            yield c.body, Const(c.label)
        elif isinstance(c, Conj):
            yield c, None

    @t.clause("imp_e")
    def _imp(c):
        if isinstance(c, Conj):
            yield Sync(STOP), c

    t.clause("release_l")(lambda c: (c,) if isinstance(c, Conj) else ())


def nonsim_table() -> FpcTable:
    t = FpcTable("nonsim")
    _nonsim_clauses(t, orient_both=False)
    t.clause("nu_unfold_l")(lambda c: (c,) if isinstance(c, Dia) else ())
    return common_table().extend(t, "nonsim")


def nonbisim_table(orient_both: bool = True) -> FpcTable:
    """Non-bisimulation assertions.

    With ``orient_both`` a root assertion made of a single item may be used
    in either direction, i.e. it certifies the goal whenever it holds of
    exactly one of the two processes.
    """
    t = FpcTable("nonbisim")
    _nonsim_clauses(t, orient_both)
    t.clause("nu_unfold_l")(lambda c: (c,) if isinstance(c, (Dia, NegDia)) else ())

    @t.clause("and_neg_e")
    def _and_neg(c):
        if isinstance(c, Dia):
            yield c, 1
        elif isinstance(c, NegDia):
            yield Dia(c.label, c.body), 2

    return common_table().extend(t, "nonbisim")


def permissive_table() -> FpcTable:
    """Answers every question with every answer; only the kernel stands guard."""
    t = FpcTable("permissive")
    _async_clerks(t, lambda c: True, lambda c: ANY)
    for rel in ("decide_l", "decide_r"):
        t.clause(rel)(lambda c, _f: (ANY,))
    for rel in ("and_pos_e", "imp_e"):
        t.clause(rel)(lambda c: ((ANY, ANY),))
    for rel in ("or_e", "and_neg_e"):
        t.clause(rel)(lambda c: ((ANY, 1), (ANY, 2)))
    for rel in ("exists_e", "forall_e"):
        t.clause(rel)(lambda c: ((ANY, None),))
    for rel in ("mu_unfold_r", "nu_unfold_l", "release_l", "release_r"):
        t.clause(rel)(lambda c: (ANY,))

    def trivial(units):
        def clause(c, arity):
            names = tuple(f"x{i}" for i in range(arity))
            for u in units:
                yield Invariant(lambda ys: ANY, ANY, PredExpr(arity, u, names))
        return clause

    t.clause("ind")(trivial((TRUE_NEG, FALSE_NEG)))
    t.clause("co_ind")(trivial((TRUE_POS, FALSE_POS)))
    return t


TABLES = {
    "common": common_table,
    "reach": reach_table,
    "nonreach": nonreach_table,
    "sim": sim_table,
    "nonsim": nonsim_table,
    "nonbisim": nonbisim_table,
    "permissive": permissive_table,
}

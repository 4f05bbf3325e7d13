"""The trusted checker.

A depth-first, chronologically backtracking interpreter of the augmented
focused proof system.  Every rule with premises consults the certificate
table; rules with no premises (closing equalities, units, clashes) do not.

The search is an explicit machine: a goal stack of pending premises and a
stack of choicepoints, so that long derivations do not consume the Python
stack.  Each accepted run yields the list of rule applications in
pre-order, from which the (certificate-free) derivation is rebuilt.
"""

from __future__ import annotations

import gc
import hashlib
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Union

from . import terms as T
from .syntax import show_formula, show_pred
from .terms import (
    AndNeg, AndPos, EigenVar, Eq, Exists, FalseNeg, FalsePos, Forall, Formula, Imp,
    LogicVar, Mu, Neq, Nu, Or, PredApp, PredExpr, TrueNeg, TruePos,
)
from .unify import CLASH, BindingStore, Stuck, apply_eigen, eigen_mgu, unify

DEFAULT_DEPTH = 10_000


class KernelError(Exception):
    pass


class InvariantViolation(KernelError):
    """A phase switch was reached with other than exactly one formula."""


class ResourceExhausted(KernelError):
    pass


# ---------------------------------------------------------------------------
# sequents


@dataclass(frozen=True)
class AsyncSeq:
    nstore: tuple = ()
    left: tuple = ()
    right: tuple = ()
    pstore: tuple = ()

    def formulas(self) -> tuple:
        return self.nstore + self.left + self.right + self.pstore


@dataclass(frozen=True)
class FocusL:
    formula: Formula

    def formulas(self) -> tuple:
        return (self.formula,)


@dataclass(frozen=True)
class FocusR:
    formula: Formula

    def formulas(self) -> tuple:
        return (self.formula,)


Sequent = Union[AsyncSeq, FocusL, FocusR]


def goal_sequent(f: Formula) -> AsyncSeq:
    return AsyncSeq(right=(f,))


def map_sequent(seq: Sequent, fn: Callable[[Formula], Formula]) -> Sequent:
    if isinstance(seq, AsyncSeq):
        return AsyncSeq(*(tuple(map(fn, zone)) for zone in
                          (seq.nstore, seq.left, seq.right, seq.pstore)))
    return type(seq)(fn(seq.formula))


def show_sequent(seq: Sequent) -> str:
    fs = lambda zone: ", ".join(map(show_formula, zone))  # noqa: E731
    if isinstance(seq, AsyncSeq):
        return (f"{fs(seq.nstore)} ^ {fs(seq.left)} |- "
                f"{fs(seq.right)} ^ {fs(seq.pstore)}").strip()
    if isinstance(seq, FocusL):
        return f"v {show_formula(seq.formula)} |-"
    return f"|- {show_formula(seq.formula)} v"


def digest(text: str) -> str:
    return hashlib.sha1(text.encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# certificate tables

#: Relation names and the shape of each alternative they produce.
CLERKS = {
    "eq_c": "cert",            # =s_c  (left =, unifiable)
    "neq_c": "cert",           # !=f_c (right !=, unifiable)
    "true_pos_c": "cert",
    "false_neg_c": "cert",
    "and_pos_c": "cert",
    "or_c": "(cert, cert)",
    "imp_c": "cert",
    "and_neg_c": "(cert, cert)",
    "exists_c": "term -> cert",
    "forall_c": "term -> cert",
    "store_l": "cert",
    "store_r": "cert",
    "ind": "Invariant",
    "co_ind": "Invariant",
    "mu_unfold_l": "cert",
    "nu_unfold_r": "cert",
}
EXPERTS = {
    "and_pos_e": "(cert, cert)",
    "or_e": "(cert, 1|2)",
    "exists_e": "(cert, term | None)",
    "imp_e": "(cert, cert)",
    "and_neg_e": "(cert, 1|2)",
    "forall_e": "(cert, term | None)",
    "decide_l": "cert",
    "decide_r": "cert",
    "release_l": "cert",
    "release_r": "cert",
    "mu_unfold_r": "cert",
    "nu_unfold_l": "cert",
}
RELATIONS = {**CLERKS, **EXPERTS}
# the context argument handed to clauses alongside the certificate
_CONTEXT = {"store_l", "store_r", "decide_l", "decide_r", "ind", "co_ind"}


@dataclass(frozen=True)
class Invariant:
    """Answer of the ind/co-ind clerks.

    ``invariant`` maps the fresh eigenvariables to the certificate of the
    closure premise; ``cont`` certifies the premise where ``pred`` replaces
    the fixed point.
    """

    invariant: Callable[[tuple], object]
    cont: object
    pred: PredExpr


class FpcTable:
    """An ordered set of clauses for each clerk and expert relation.

    A clause is a function ``(cert, *context) -> iterable of alternatives``.
    Alternatives of a relation are enumerated clause by clause in
    registration order.  For ``store_*``, ``decide_*`` the context is the
    formula involved; for ``ind``/``co_ind`` it is the fixed-point arity.
    """

    def __init__(self, name: str = "table"):
        self.name = name
        self.clauses: dict = {rel: [] for rel in RELATIONS}

    def clause(self, rel: str):
        if rel not in RELATIONS:
            raise KeyError(f"unknown clerk/expert relation {rel!r}")

        def register(fn):
            self.clauses[rel].append(fn)
            return fn

        return register

    def extend(self, other: "FpcTable", name: Optional[str] = None) -> "FpcTable":
        out = FpcTable(name or f"{self.name}+{other.name}")
        for rel in RELATIONS:
            out.clauses[rel] = self.clauses[rel] + other.clauses[rel]
        return out

    def ask(self, rel: str, cert, *context) -> Iterator:
        for fn in self.clauses[rel]:
            yield from fn(cert, *context) or ()


# ---------------------------------------------------------------------------
# derivations


@dataclass(frozen=True)
class Step:
    rule: str
    sequent: Sequent
    cert: object
    premises: int
    data: tuple = ()

    def line(self) -> str:
        return f"{self.rule} {digest(show_sequent(self.sequent))} {digest(str(self.cert))}"


@dataclass(frozen=True)
class Derivation:
    rule: str
    sequent: Sequent
    premises: tuple = ()
    data: tuple = ()

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def rules(self) -> list:
        out = [self.rule]
        for p in self.premises:
            out.extend(p.rules())
        return out


@dataclass
class Result:
    status: str                 # "accepted" | "rejected" | "exhausted"
    trace: list = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.status == "accepted"

    def __bool__(self) -> bool:
        return self.accepted

    def lines(self) -> list:
        return [s.line() for s in self.trace]


def erase(trace: list) -> Derivation:
    """Rebuild the certificate-free derivation from a pre-order trace."""
    pos = 0

    def build() -> Derivation:
        nonlocal pos
        step = trace[pos]
        pos += 1
        kids = tuple(build() for _ in range(step.premises))
        return Derivation(step.rule, step.sequent, kids, step.data)

    d = build()
    if pos != len(trace):
        raise KernelError("trace does not describe a single derivation")
    return d


def phase_switch_violations(trace: Iterable[Step]) -> list:
    """Decide/release conclusions not holding exactly one formula."""
    return [s for s in trace
            if s.rule.startswith(("decide", "release")) and len(s.sequent.formulas()) != 1]


# ---------------------------------------------------------------------------
# the machine


@dataclass
class _Goal:
    seq: Sequent
    cert: object
    depth: int


@dataclass
class _Choice:
    alts: Iterator
    goal: _Goal
    rest: Optional[tuple]   # goal stack below the expanded goal (cons list)
    trace: Optional[tuple]  # trace cons list before the expansion
    cp: object
    level: int
    ids: int
    once: bool = False      # the goal binds nothing outside its own subproof


@dataclass
class _Cut:
    """Reached when a ground goal is proved: its leftover alternatives are useless."""

    choice: _Choice


class _Session:
    def __init__(self, table: FpcTable, depth: int):
        self.table = table
        self.max_depth = depth
        self.store = BindingStore()
        self.level = 0
        self.ids = 0
        self.exhausted = False

    # fresh variables --------------------------------------------------------

    def eigens(self, n: int) -> tuple:
        self.level += 1
        out = []
        for _ in range(n):
            self.ids += 1
            out.append(EigenVar(self.ids, self.level))
        return tuple(out)

    def logic_var(self) -> LogicVar:
        self.ids += 1
        return LogicVar(self.ids, self.level)

    def witness(self, t) -> T.Term:
        return self.logic_var() if t is None else t

    # rule expansion ---------------------------------------------------------

    def expand(self, g: _Goal) -> Iterator:
        """Yield ``(rule, premises, data)`` for each applicable alternative.

        Unification side effects happen between yields; the machine rolls
        the store back before resuming the generator.
        """
        if g.depth >= self.max_depth:
            self.exhausted = True
            return
        seq = g.seq
        if isinstance(seq, FocusR):
            yield from self.focus_right(seq.formula, g.cert)
        elif isinstance(seq, FocusL):
            yield from self.focus_left(seq.formula, g.cert)
        elif seq.left:
            yield from self.async_left(seq, g.cert)
        elif seq.right:
            yield from self.async_right(seq, g.cert)
        else:
            yield from self.decide(seq, g.cert)

    def ask(self, rel, cert, *ctx):
        return self.table.ask(rel, cert, *ctx)

    def _theta(self, sub: dict, seq: AsyncSeq) -> AsyncSeq:
        if not sub:
            return seq
        store, memo = self.store, {}
        fn = lambda v: apply_eigen(sub, store.resolve(v))  # noqa: E731
        return map_sequent(seq, lambda f: T.map_terms(f, fn, memo))

    def _mgu(self, s, t):
        try:
            return eigen_mgu(s, t, self.store)
        except Stuck:
            return "stuck"

    def async_left(self, seq: AsyncSeq, cert):
        a, rest = seq.left[0], seq.left[1:]
        ctx = AsyncSeq(seq.nstore, rest, seq.right, seq.pstore)
        if not T.is_positive(a):
            for c in self.ask("store_l", cert, a):
                yield "store_l", [(AsyncSeq(seq.nstore + (a,), rest, seq.right, seq.pstore), c)], ()
            return
        if isinstance(a, Eq):
            sub = self._mgu(a.left, a.right)
            if sub is CLASH:
                yield "eq_l", [], ()
            elif sub != "stuck":
                prem = self._theta(sub, ctx)
                for c in self.ask("eq_c", cert):
                    yield "eq_l", [(prem, c)], (tuple(sub.items()),)
        elif isinstance(a, TruePos):
            for c in self.ask("true_pos_c", cert):
                yield "true_pos_l", [(ctx, c)], ()
        elif isinstance(a, FalsePos):
            yield "false_pos_l", [], ()
        elif isinstance(a, AndPos):
            for c in self.ask("and_pos_c", cert):
                yield "and_pos_l", [(AsyncSeq(seq.nstore, (a.left, a.right) + rest,
                                              seq.right, seq.pstore), c)], ()
        elif isinstance(a, Or):
            for c1, c2 in self.ask("or_c", cert):
                yield "or_l", [
                    (AsyncSeq(seq.nstore, (a.left,) + rest, seq.right, seq.pstore), c1),
                    (AsyncSeq(seq.nstore, (a.right,) + rest, seq.right, seq.pstore), c2),
                ], ()
        elif isinstance(a, Exists):
            level, ids = self.level, self.ids
            for abst in self.ask("exists_c", cert):
                self.level, self.ids = level, ids
                (y,) = self.eigens(1)
                yield "exists_l", [(AsyncSeq(seq.nstore, (T.open_binder(a, y),) + rest,
                                             seq.right, seq.pstore), abst(y))], (y,)
        elif isinstance(a, Mu):
            yield from self.induction(a, seq, cert, rest)
            for c in self.ask("mu_unfold_l", cert):
                yield "mu_l", [(AsyncSeq(seq.nstore, (T.unfold(a),) + rest,
                                         seq.right, seq.pstore), c)], ()
        else:
            raise KernelError(f"unexpected formula on the left: {a!r}")

    def async_right(self, seq: AsyncSeq, cert):
        a, rest = seq.right[-1], seq.right[:-1]
        ctx = AsyncSeq(seq.nstore, seq.left, rest, seq.pstore)
        if T.is_positive(a):
            for c in self.ask("store_r", cert, a):
                yield "store_r", [(AsyncSeq(seq.nstore, seq.left, rest, seq.pstore + (a,)), c)], ()
            return
        if isinstance(a, Neq):
            sub = self._mgu(a.left, a.right)
            if sub is CLASH:
                yield "neq_r", [], ()
            elif sub != "stuck":
                prem = self._theta(sub, ctx)
                for c in self.ask("neq_c", cert):
                    yield "neq_r", [(prem, c)], (tuple(sub.items()),)
        elif isinstance(a, FalseNeg):
            for c in self.ask("false_neg_c", cert):
                yield "false_neg_r", [(ctx, c)], ()
        elif isinstance(a, TrueNeg):
            yield "true_neg_r", [], ()
        elif isinstance(a, Imp):
            for c in self.ask("imp_c", cert):
                yield "imp_r", [(AsyncSeq(seq.nstore, seq.left + (a.left,),
                                          rest + (a.right,), seq.pstore), c)], ()
        elif isinstance(a, AndNeg):
            for c1, c2 in self.ask("and_neg_c", cert):
                yield "and_neg_r", [
                    (AsyncSeq(seq.nstore, seq.left, rest + (a.left,), seq.pstore), c1),
                    (AsyncSeq(seq.nstore, seq.left, rest + (a.right,), seq.pstore), c2),
                ], ()
        elif isinstance(a, Forall):
            level, ids = self.level, self.ids
            for abst in self.ask("forall_c", cert):
                self.level, self.ids = level, ids
                (y,) = self.eigens(1)
                yield "forall_r", [(AsyncSeq(seq.nstore, seq.left,
                                             rest + (T.open_binder(a, y),), seq.pstore),
                                    abst(y))], (y,)
        elif isinstance(a, Nu):
            yield from self.coinduction(a, seq, cert, rest)
            for c in self.ask("nu_unfold_r", cert):
                yield "nu_r", [(AsyncSeq(seq.nstore, seq.left, rest + (T.unfold(a),),
                                         seq.pstore), c)], ()
        else:
            raise KernelError(f"unexpected formula on the right: {a!r}")

    def _restricted(self, seq: AsyncSeq, left_rest: tuple, right_rest: tuple) -> bool:
        # the context must not trigger synchronous rules
        return (not seq.nstore and not seq.pstore
                and all(T.purely_positive(f) for f in left_rest)
                and all(T.purely_negative(f) for f in right_rest))

    def induction(self, a: Mu, seq: AsyncSeq, cert, rest):
        if not self._restricted(seq, rest, seq.right):
            return
        level, ids = self.level, self.ids
        for inv in self.ask("ind", cert, a.body.arity):
            s = inv.pred
            if s.arity != a.body.arity or not T.purely_negative(s.body):
                continue
            self.level, self.ids = level, ids
            ys = self.eigens(s.arity)
            closure = AsyncSeq((), (T.apply_body(a.body, s, ys),), (T.apply_pred(s, ys),), ())
            use = AsyncSeq(seq.nstore, (T.apply_pred(s, a.args),) + rest, seq.right, seq.pstore)
            yield "ind", [(closure, inv.invariant(ys)), (use, inv.cont)], (s, ys)

    def coinduction(self, a: Nu, seq: AsyncSeq, cert, rest):
        if not self._restricted(seq, seq.left, rest):
            return
        level, ids = self.level, self.ids
        for inv in self.ask("co_ind", cert, a.body.arity):
            s = inv.pred
            if s.arity != a.body.arity or not T.purely_positive(s.body):
                continue
            self.level, self.ids = level, ids
            ys = self.eigens(s.arity)
            closure = AsyncSeq((), (T.apply_pred(s, ys),), (T.apply_body(a.body, s, ys, False),), ())
            use = AsyncSeq(seq.nstore, seq.left, rest + (T.apply_pred(s, a.args),), seq.pstore)
            yield "co_ind", [(closure, inv.invariant(ys)), (use, inv.cont)], (s, ys)

    def decide(self, seq: AsyncSeq, cert):
        stored = seq.nstore + seq.pstore
        if not stored:
            return
        if len(stored) != 1:
            raise InvariantViolation(
                f"phase switch with {len(stored)} formulas: {show_sequent(seq)}")
        if seq.nstore:
            (n,) = seq.nstore
            for c in self.ask("decide_l", cert, n):
                yield "decide_l", [(FocusL(n), c)], ()
        else:
            (p,) = seq.pstore
            for c in self.ask("decide_r", cert, p):
                yield "decide_r", [(FocusR(p), c)], ()

    def focus_right(self, a: Formula, cert):
        if not T.is_positive(a):
            for c in self.ask("release_r", cert):
                yield "release_r", [(AsyncSeq(right=(a,)), c)], ()
            return
        if isinstance(a, Eq):
            if unify(a.left, a.right, self.store):
                yield "eq_r", [], ()
        elif isinstance(a, TruePos):
            yield "true_pos_r", [], ()
        elif isinstance(a, FalsePos):
            return
        elif isinstance(a, AndPos):
            for c1, c2 in self.ask("and_pos_e", cert):
                yield "and_pos_r", [(FocusR(a.left), c1), (FocusR(a.right), c2)], ()
        elif isinstance(a, Or):
            for c, i in self.ask("or_e", cert):
                yield "or_r", [(FocusR(a.left if i == 1 else a.right), c)], (i,)
        elif isinstance(a, Exists):
            level, ids = self.level, self.ids
            for c, t in self.ask("exists_e", cert):
                self.level, self.ids = level, ids
                t = self.witness(t)
                yield "exists_r", [(FocusR(T.open_binder(a, t)), c)], (t,)
        elif isinstance(a, Mu):
            for c in self.ask("mu_unfold_r", cert):
                yield "mu_r", [(FocusR(T.unfold(a)), c)], ()
        else:
            raise KernelError(f"unexpected formula under right focus: {a!r}")

    def focus_left(self, a: Formula, cert):
        if T.is_positive(a):
            for c in self.ask("release_l", cert):
                yield "release_l", [(AsyncSeq(left=(a,)), c)], ()
            return
        if isinstance(a, Neq):
            if unify(a.left, a.right, self.store):
                yield "neq_l", [], ()
        elif isinstance(a, FalseNeg):
            yield "false_neg_l", [], ()
        elif isinstance(a, TrueNeg):
            return
        elif isinstance(a, Imp):
            for c1, c2 in self.ask("imp_e", cert):
                yield "imp_l", [(FocusR(a.left), c1), (FocusL(a.right), c2)], ()
        elif isinstance(a, AndNeg):
            for c, i in self.ask("and_neg_e", cert):
                yield "and_neg_l", [(FocusL(a.left if i == 1 else a.right), c)], (i,)
        elif isinstance(a, Forall):
            level, ids = self.level, self.ids
            for c, t in self.ask("forall_e", cert):
                self.level, self.ids = level, ids
                t = self.witness(t)
                yield "forall_l", [(FocusL(T.open_binder(a, t)), c)], (t,)
        elif isinstance(a, Nu):
            for c in self.ask("nu_unfold_l", cert):
                yield "nu_l", [(FocusL(T.unfold(a)), c)], ()
        else:
            raise KernelError(f"unexpected formula under left focus: {a!r}")

    # driver -----------------------------------------------------------------

    def run(self, seq: Sequent, cert) -> Optional[list]:
        goals = (_Goal(seq, cert, 0), None)
        trace = None
        choices: list = []
        while True:
            if goals is None:
                return self.finish(trace)
            g, rest = goals
            if isinstance(g, _Cut):
                self.cut(choices, g.choice)
                goals = rest
                continue
            choices.append(_Choice(self.expand(g), g, rest, trace,
                                   self.store.checkpoint(), self.level, self.ids,
                                   self.ground(g.seq)))
            # resume the newest choicepoint until one of its alternatives applies
            while True:
                if not choices:
                    return None
                ch = choices[-1]
                self.store.rollback(ch.cp)
                self.level, self.ids = ch.level, ch.ids
                alt = next(ch.alts, None)
                if alt is None:
                    choices.pop()
                    self.store.release(ch.cp)
                    continue
                rule, premises, data = alt
                step = Step(rule, ch.goal.seq, ch.goal.cert, len(premises), data)
                trace = (step, ch.trace)
                goals = (_Cut(ch), ch.rest) if ch.once and premises else ch.rest
                for pseq, pcert in reversed(premises):
                    goals = (_Goal(pseq, pcert, ch.goal.depth + 1), goals)
                break

    def ground(self, seq: Sequent) -> bool:
        # only asynchronous goals are worth cutting: that is where branches split off
        if not isinstance(seq, AsyncSeq):
            return False
        for f in seq.formulas():
            for v in T.logic_vars(f):
                if any(isinstance(w, LogicVar) for w in T.term_vars(self.store.resolve(v))):
                    return False
        return True

    def cut(self, choices: list, ch: _Choice) -> None:
        # choicepoints newer than ``ch`` all belong to its (finished) subproof
        for i in range(len(choices) - 1, -1, -1):
            if choices[i] is ch:
                self.store.release(ch.cp)
                del choices[i:]
                return
        raise KernelError("cut of a choicepoint that is no longer live")

    def finish(self, trace) -> list:
        steps = []
        while trace is not None:
            steps.append(trace[0])
            trace = trace[1]
        steps.reverse()
        resolve = lambda v: self.store.resolve(v)  # noqa: E731
        memo: dict = {}
        fix = lambda f: T.map_terms(f, resolve, memo, logic_only=True)  # noqa: E731
        out = []
        for s in steps:
            data = tuple(self.store.resolve(d) if isinstance(d, LogicVar) else d
                         for d in s.data)
            out.append(Step(s.rule, map_sequent(s.sequent, fix), s.cert, s.premises, data))
        return out


@contextmanager
def gc_paused():
    """Pause the cycle collector; proof search allocates many short-lived acyclic objects."""
    was = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was:
            gc.enable()


def check(table: FpcTable, cert, goal: Union[Formula, Sequent],
          depth: int = DEFAULT_DEPTH, require_switchable: bool = True) -> Result:
    """Check ``cert`` for ``goal`` (a formula proved on the right, or a sequent)."""
    if depth < 1:
        raise ValueError("depth bound must be at least 1")
    seq = goal if isinstance(goal, (AsyncSeq, FocusL, FocusR)) else goal_sequent(goal)
    seq = map_sequent(seq, T.beta)
    if require_switchable:
        for f in seq.formulas():
            side = T.Side.LEFT if isinstance(seq, AsyncSeq) and f in seq.left + seq.nstore \
                else T.Side.RIGHT
            if not T.switchable(f, side):
                raise InvariantViolation(f"goal formula is not switchable: {show_formula(f)}")
    session = _Session(table, depth)
    with gc_paused():
        trace = session.run(seq, cert)
    if trace is not None:
        bad = phase_switch_violations(trace)
        if bad:
            raise InvariantViolation(f"{len(bad)} phase switches break the one-formula invariant")
        return Result("accepted", trace)
    return Result("exhausted" if session.exhausted else "rejected")


def show_invariant(p: PredExpr) -> str:
    return show_pred(p)

"""Terms, polarized formulas and fixed-point bodies.

Binders are nameless: term variables bound by quantifiers, fixed-point
bodies and predicate expressions are de Bruijn indices (``BVar``), and the
predicate variable of a fixed-point body is a separate index space
(``PVar``).  Name hints are carried for printing only and never take part
in equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence, Union


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Const:
    name: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return "(" + " ".join([self.name, *map(str, self.args)]) + ")"


@dataclass(frozen=True)
class LogicVar:
    id: int
    level: int

    def __str__(self) -> str:
        return f"?{self.id}:{self.level}"


@dataclass(frozen=True)
class EigenVar:
    id: int
    level: int

    def __str__(self) -> str:
        return f"!{self.id}:{self.level}"


@dataclass(frozen=True)
class BVar:
    """Bound term variable; index 0 is the innermost binder."""

    index: int


Term = Union[Const, LogicVar, EigenVar, BVar]


def const(name: str, *args: Term) -> Const:
    return Const(name, tuple(args))


def term_vars(t: Term):
    """Yield every logic and eigen variable occurring in ``t``."""
    if isinstance(t, Const):
        for a in t.args:
            yield from term_vars(a)
    elif isinstance(t, (LogicVar, EigenVar)):
        yield t


def shift_term(t: Term, amount: int, cutoff: int = 0) -> Term:
    if amount == 0:
        return t
    if isinstance(t, BVar):
        return BVar(t.index + amount) if t.index >= cutoff else t
    if isinstance(t, Const) and t.args:
        return Const(t.name, tuple(shift_term(a, amount, cutoff) for a in t.args))
    return t


def map_term(t: Term, fn: Callable[[Term], Term]) -> Term:
    """Rebuild ``t`` bottom-up, applying ``fn`` to every variable leaf."""
    if isinstance(t, Const):
        if not t.args:
            return t
        return Const(t.name, tuple(map_term(a, fn) for a in t.args))
    return fn(t)


# ---------------------------------------------------------------------------
# formulas


class Polarity(Enum):
    POSITIVE = "+"
    NEGATIVE = "-"

    def flip(self) -> "Polarity":
        return Polarity.NEGATIVE if self is Polarity.POSITIVE else Polarity.POSITIVE


@dataclass(frozen=True)
class TruePos:
    pass


@dataclass(frozen=True)
class FalsePos:
    pass


@dataclass(frozen=True)
class TrueNeg:
    pass


@dataclass(frozen=True)
class FalseNeg:
    pass


@dataclass(frozen=True)
class AndPos:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class AndNeg:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Neq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Exists:
    body: "Formula"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Forall:
    body: "Formula"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Body:
    """Abstraction over one predicate variable and ``arity`` term variables.

    Inside ``formula`` the last parameter is ``BVar(0)`` and the predicate
    variable is ``PVar(0)``.
    """

    arity: int
    formula: "Formula"
    pred_hint: str = field(default="P", compare=False)
    hints: tuple = field(default=(), compare=False)


@dataclass(frozen=True)
class PredExpr:
    """Closed predicate ``lam x1..xn. body`` (no predicate variable)."""

    arity: int
    body: "Formula"
    hints: tuple = field(default=(), compare=False)


@dataclass(frozen=True)
class PVar:
    index: int


@dataclass(frozen=True)
class Mu:
    body: Body
    args: tuple


@dataclass(frozen=True)
class Nu:
    body: Body
    args: tuple


@dataclass(frozen=True)
class PredApp:
    pred: Union[PVar, PredExpr]
    args: tuple
    positive: bool = True


Formula = Union[
    TruePos, FalsePos, TrueNeg, FalseNeg, AndPos, AndNeg, Or, Imp, Eq, Neq,
    Exists, Forall, Mu, Nu, PredApp,
]

TRUE_POS = TruePos()
FALSE_POS = FalsePos()
TRUE_NEG = TrueNeg()
FALSE_NEG = FalseNeg()

_POSITIVE = (TruePos, FalsePos, AndPos, Or, Eq, Exists, Mu)


class ArityError(ValueError):
    pass


def disj(*fs: Formula) -> Formula:
    """Right-nested disjunction; the empty disjunction is ``false+``."""
    if not fs:
        return FALSE_POS
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def conj_pos(*fs: Formula) -> Formula:
    if not fs:
        return TRUE_POS
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = AndPos(f, out)
    return out


def polarity(f: Formula) -> Polarity:
    if isinstance(f, PredApp):
        if isinstance(f.pred, PredExpr):
            p = polarity(f.pred.body)
            return p if f.positive else p.flip()
        return Polarity.POSITIVE if f.positive else Polarity.NEGATIVE
    return Polarity.POSITIVE if isinstance(f, _POSITIVE) else Polarity.NEGATIVE


def is_positive(f: Formula) -> bool:
    return polarity(f) is Polarity.POSITIVE


def subformulas(f: Formula):
    """Immediate subformulas paired with whether they sit under an extra implication."""
    if isinstance(f, Imp):
        return [(f.left, 1), (f.right, 0)]
    if isinstance(f, (AndPos, AndNeg, Or)):
        return [(f.left, 0), (f.right, 0)]
    if isinstance(f, (Exists, Forall)):
        return [(f.body, 0)]
    if isinstance(f, (Mu, Nu)):
        return [(f.body.formula, 0)]
    if isinstance(f, PredApp) and isinstance(f.pred, PredExpr):
        return [(f.pred.body, 0)]
    return []


def _pure(f: Formula, want: Polarity, parity: int) -> bool:
    expected = want if parity % 2 == 0 else want.flip()
    if isinstance(f, PredApp) and isinstance(f.pred, PredExpr):
        inner = f.pred.body if f.positive else dual(f.pred.body)
        return _pure(inner, want, parity)
    if polarity(f) is not expected:
        return False
    return all(_pure(g, want, parity + d) for g, d in subformulas(f))


def purely_positive(f: Formula) -> bool:
    return _pure(f, Polarity.POSITIVE, 0)


def purely_negative(f: Formula) -> bool:
    return _pure(f, Polarity.NEGATIVE, 0)


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


def _switch_ok(f: Formula, parity: int) -> bool:
    if isinstance(f, AndPos) and parity % 2 == 1:
        if not (purely_positive(f.left) or purely_positive(f.right)):
            return False
    if isinstance(f, Imp) and parity % 2 == 0:
        if not (purely_positive(f.left) or purely_negative(f.right)):
            return False
    return all(_switch_ok(g, parity + d) for g, d in subformulas(f))


def switchable(f: Formula, side: Side = Side.RIGHT) -> bool:
    return _switch_ok(f if side is Side.RIGHT else Imp(f, FALSE_NEG), 0)


# ---------------------------------------------------------------------------
# de Morgan duality


def _dual_body(b: Body) -> Body:
    return Body(b.arity, dual(b.formula), b.pred_hint, b.hints)


def dual(f: Formula) -> Formula:
    if isinstance(f, TruePos):
        return FALSE_NEG
    if isinstance(f, FalseNeg):
        return TRUE_POS
    if isinstance(f, FalsePos):
        return TRUE_NEG
    if isinstance(f, TrueNeg):
        return FALSE_POS
    if isinstance(f, AndPos):
        return Imp(f.left, dual(f.right))
    if isinstance(f, Imp):
        return AndPos(f.left, dual(f.right))
    if isinstance(f, AndNeg):
        return Or(dual(f.left), dual(f.right))
    if isinstance(f, Or):
        return AndNeg(dual(f.left), dual(f.right))
    if isinstance(f, Eq):
        return Neq(f.left, f.right)
    if isinstance(f, Neq):
        return Eq(f.left, f.right)
    if isinstance(f, Exists):
        return Forall(dual(f.body), f.hint)
    if isinstance(f, Forall):
        return Exists(dual(f.body), f.hint)
    if isinstance(f, Mu):
        return Nu(_dual_body(f.body), f.args)
    if isinstance(f, Nu):
        return Mu(_dual_body(f.body), f.args)
    if isinstance(f, PredApp):
        return PredApp(f.pred, f.args, not f.positive)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# substitution


def _free(f: Formula, depth: int, pdepth: int) -> tuple:
    """(has free term or predicate binders, has logic/eigen variables) below ``f``."""
    def term(t):
        if isinstance(t, BVar):
            return t.index >= depth, False
        if isinstance(t, (LogicVar, EigenVar)):
            return False, True
        if isinstance(t, Const) and t.args:
            rs = [term(a) for a in t.args]
            return any(r[0] for r in rs), any(r[1] for r in rs)
        return False, False

    if isinstance(f, (Eq, Neq)):
        rs = [term(f.left), term(f.right)]
    elif isinstance(f, (AndPos, AndNeg, Or, Imp)):
        rs = [_free(f.left, depth, pdepth), _free(f.right, depth, pdepth)]
    elif isinstance(f, (Exists, Forall)):
        rs = [_free(f.body, depth + 1, pdepth)]
    elif isinstance(f, (Mu, Nu)):
        rs = [_free(f.body.formula, depth + f.body.arity, pdepth + 1)] + [term(t) for t in f.args]
    elif isinstance(f, PredApp):
        rs = [term(t) for t in f.args]
        if isinstance(f.pred, PVar):
            rs.append((f.pred.index >= pdepth, False))
        else:
            rs.append((False, _free(f.pred.body, f.pred.arity, 0)[1]))
    else:
        rs = []
    return any(r[0] for r in rs), any(r[1] for r in rs)


_BINARY = frozenset((AndPos, AndNeg, Or, Imp))
_UNITS = frozenset((TruePos, FalsePos, TrueNeg, FalseNeg))
_LOGIC, _EIGEN, _NONE = (True, False), (False, True), (False, False)


def _term_kinds(t: Term) -> tuple:
    cls = type(t)
    if cls is LogicVar:
        return _LOGIC
    if cls is EigenVar:
        return _EIGEN
    if cls is Const and t.args:
        logic = eigen = False
        for a in t.args:
            k = _term_kinds(a)
            logic, eigen = logic or k[0], eigen or k[1]
        return logic, eigen
    return _NONE


def var_kinds(f: Formula) -> tuple:
    """``(logic, eigen)``: which kinds of variables occur in ``f`` (cached on the object)."""
    hit = f.__dict__.get("_vars")
    if hit is not None:
        return hit
    cls = type(f)
    if cls is Eq or cls is Neq:
        ks = (_term_kinds(f.left), _term_kinds(f.right))
    elif cls in _BINARY:
        ks = (var_kinds(f.left), var_kinds(f.right))
    elif cls is Exists or cls is Forall:
        ks = (var_kinds(f.body),)
    elif cls is Mu or cls is Nu:
        ks = [_term_kinds(t) for t in f.args]
        if not body_info(f.body)[1]:
            ks.append(var_kinds(f.body.formula))
    elif cls is PredApp:
        ks = [_term_kinds(t) for t in f.args]
        if isinstance(f.pred, PredExpr):
            ks.append(var_kinds(f.pred.body))
    else:
        ks = ()
    logic = eigen = False
    for k in ks:
        logic, eigen = logic or k[0], eigen or k[1]
    out = (logic, eigen)
    object.__setattr__(f, "_vars", out)
    return out


def _term_logic(t: Term, out: set) -> None:
    if isinstance(t, LogicVar):
        out.add(t)
    elif isinstance(t, Const):
        for a in t.args:
            _term_logic(a, out)


def logic_vars(f: Formula) -> frozenset:
    """Logic variables occurring in ``f`` (cached on the object)."""
    hit = f.__dict__.get("_lvars")
    if hit is not None:
        return hit
    if not var_kinds(f)[0]:
        out = frozenset()
    else:
        acc: set = set()
        if isinstance(f, (Eq, Neq)):
            _term_logic(f.left, acc)
            _term_logic(f.right, acc)
        elif isinstance(f, (AndPos, AndNeg, Or, Imp)):
            acc |= logic_vars(f.left) | logic_vars(f.right)
        elif isinstance(f, (Exists, Forall)):
            acc |= logic_vars(f.body)
        elif isinstance(f, (Mu, Nu)):
            for t in f.args:
                _term_logic(t, acc)
            if not body_info(f.body)[1]:
                acc |= logic_vars(f.body.formula)
        elif isinstance(f, PredApp):
            for t in f.args:
                _term_logic(t, acc)
            if isinstance(f.pred, PredExpr):
                acc |= logic_vars(f.pred.body)
        out = frozenset(acc)
    object.__setattr__(f, "_lvars", out)
    return out


def has_vars(f: Formula) -> bool:
    return any(var_kinds(f))


def body_info(b: Body) -> tuple:
    """``(closed, ground)`` for a fixed-point body, computed once per object."""
    info = b.__dict__.get("_info")
    if info is None:
        free, has_vars = _free(b.formula, b.arity, 1)
        info = (not free, not has_vars)
        object.__setattr__(b, "_info", info)
    return info


def _subst_term(t: Term, vals: Sequence[Term], depth: int) -> Term:
    cls = type(t)
    if cls is BVar:
        if t.index < depth:
            return t
        k = t.index - depth
        if k < len(vals):
            return shift_term(vals[k], depth)
        return BVar(t.index - len(vals))
    if cls is Const and t.args:
        return Const(t.name, tuple(_subst_term(a, vals, depth) for a in t.args))
    return t


PredVal = Callable[[tuple, bool], Formula]


def _subst(f: Formula, vals: Sequence[Term], preds: Sequence[PredVal],
           depth: int, pdepth: int) -> Formula:
    cls = type(f)
    if cls in _BINARY:
        return cls(_subst(f.left, vals, preds, depth, pdepth),
                   _subst(f.right, vals, preds, depth, pdepth))
    if cls is Eq or cls is Neq:
        return cls(_subst_term(f.left, vals, depth), _subst_term(f.right, vals, depth))
    if cls in _UNITS:
        return f
    if cls is Exists or cls is Forall:
        return cls(_subst(f.body, vals, preds, depth + 1, pdepth), f.hint)
    args = tuple(_subst_term(t, vals, depth) for t in f.args)
    if cls is Mu or cls is Nu:
        b = f.body
        if not body_info(b)[0]:
            inner = _subst(b.formula, vals, preds, depth + b.arity, pdepth + 1)
            b = Body(b.arity, inner, b.pred_hint, b.hints)
        return cls(b, args)
    if cls is PredApp:
        p = f.pred
        if isinstance(p, PredExpr) or p.index < pdepth:
            return PredApp(p, args, f.positive)
        k = p.index - pdepth
        if k < len(preds):
            return preds[k](args, f.positive)
        return PredApp(PVar(p.index - len(preds)), args, f.positive)
    raise TypeError(f"not a formula: {f!r}")


def instantiate(f: Formula, args: Sequence[Term]) -> Formula:
    """Substitute ``args`` (outermost first) for the innermost free binders."""
    return _subst(f, list(reversed(args)), [], 0, 0)


def open_binder(q: Union[Exists, Forall], t: Term) -> Formula:
    return instantiate(q.body, [t])


def apply_pred(s: PredExpr, args: Sequence[Term]) -> Formula:
    if len(args) != s.arity:
        raise ArityError(f"predicate of arity {s.arity} applied to {len(args)} terms")
    return beta(instantiate(s.body, args))


def _pred_value(make: Callable[[tuple], Formula], decl: bool) -> PredVal:
    # occurrences carrying the binder's declared flag denote the value itself
    def val(args, positive):
        g = make(args)
        return g if positive == decl else dual(g)
    return val


def apply_body(b: Body, pred: Union[PredExpr, Callable[[tuple], Formula]],
               args: Sequence[Term], decl: bool = True) -> Formula:
    """``B pred args``: instantiate a fixed-point body.

    ``decl`` is the polarity flag the binder declares (true for mu, false for nu).
    """
    if len(args) != b.arity:
        raise ArityError(f"body of arity {b.arity} applied to {len(args)} terms")
    if isinstance(pred, PredExpr):
        if pred.arity != b.arity:
            raise ArityError("predicate arity does not match the body")
        s = pred
        make = lambda a: apply_pred(s, a)  # noqa: E731
    else:
        make = pred
    return _subst(b.formula, list(reversed(args)), [_pred_value(make, decl)], 0, 0)


def unfold(fp: Union[Mu, Nu]) -> Formula:
    if not isinstance(fp, (Mu, Nu)):
        raise TypeError("unfold expects a fixed point")
    kind = type(fp)
    b = fp.body
    return apply_body(b, lambda a: kind(b, a), fp.args, kind is Mu)


def beta(f: Formula) -> Formula:
    """Reduce every application of a closed predicate expression."""
    if isinstance(f, PredApp):
        if isinstance(f.pred, PredExpr):
            g = apply_pred(f.pred, f.args)
            return g if f.positive else dual(g)
        return f
    if isinstance(f, (AndPos, AndNeg, Or, Imp)):
        return type(f)(beta(f.left), beta(f.right))
    if isinstance(f, (Exists, Forall)):
        return type(f)(beta(f.body), f.hint)
    if isinstance(f, (Mu, Nu)):
        b = f.body
        return type(f)(Body(b.arity, beta(b.formula), b.pred_hint, b.hints), f.args)
    return f


def map_terms(f: Formula, fn: Callable[[Term], Term], memo: dict | None = None,
              logic_only: bool = False) -> Formula:
    """Apply ``fn`` to every logic/eigen variable leaf of every term in ``f``.

    ``memo`` (keyed by object identity) lets shared subformulas be mapped once;
    ``logic_only`` promises that ``fn`` leaves eigenvariables alone.
    """
    if memo is not None:
        hit = memo.get(id(f))
        if hit is not None and hit[0] is f:
            return hit[1]
    kinds = var_kinds(f)
    if not (kinds[0] if logic_only else kinds[0] or kinds[1]):
        return f
    cls = type(f)
    if cls in _BINARY:
        out = cls(map_terms(f.left, fn, memo, logic_only), map_terms(f.right, fn, memo, logic_only))
    elif cls is Eq or cls is Neq:
        out = cls(map_term(f.left, fn), map_term(f.right, fn))
    elif cls is Exists or cls is Forall:
        out = cls(map_terms(f.body, fn, memo, logic_only), f.hint)
    elif cls is Mu or cls is Nu:
        b = f.body
        if not body_info(b)[1]:
            b = Body(b.arity, map_terms(b.formula, fn, memo, logic_only), b.pred_hint, b.hints)
        out = cls(b, tuple(map_term(t, fn) for t in f.args))
    elif cls is PredApp:
        p = f.pred
        if isinstance(p, PredExpr):
            p = PredExpr(p.arity, map_terms(p.body, fn, memo, logic_only), p.hints)
        out = PredApp(p, tuple(map_term(t, fn) for t in f.args), f.positive)
    else:
        raise TypeError(f"not a formula: {f!r}")
    if memo is not None:
        memo[id(f)] = (f, out)
    return out


def formula_vars(f: Formula) -> set:
    found: set = set()

    def grab(v):
        if isinstance(v, (LogicVar, EigenVar)):
            found.add(v)
        return v

    map_terms(f, grab)
    return found


def check_arities(f: Formula, pred_arities: tuple = ()) -> None:
    """Raise ``ArityError`` if some predicate application has the wrong arity."""
    if isinstance(f, PredApp):
        if isinstance(f.pred, PredExpr):
            want = f.pred.arity
            check_arities(f.pred.body, ())
        elif f.pred.index < len(pred_arities):
            want = pred_arities[f.pred.index]
        else:
            raise ArityError(f"free predicate variable {f.pred.index}")
        if len(f.args) != want:
            raise ArityError(f"predicate of arity {want} applied to {len(f.args)} terms")
        return
    if isinstance(f, (Mu, Nu)):
        if len(f.args) != f.body.arity:
            raise ArityError("fixed point applied to the wrong number of terms")
        check_arities(f.body.formula, (f.body.arity, *pred_arities))
        return
    for g, _ in subformulas(f):
        check_arities(g, pred_arities)


# ---------------------------------------------------------------------------
# unit elimination


def units_as_equalities(f: Formula, a: Term = Const("a"), b: Term = Const("b")) -> Formula:
    """Replace the four units by (dis)equalities between two distinct constants."""
    if isinstance(f, TruePos):
        return Eq(a, a)
    if isinstance(f, FalsePos):
        return Eq(a, b)
    if isinstance(f, FalseNeg):
        return Neq(a, a)
    if isinstance(f, TrueNeg):
        return Neq(a, b)
    if isinstance(f, (AndPos, AndNeg, Or, Imp)):
        return type(f)(units_as_equalities(f.left, a, b), units_as_equalities(f.right, a, b))
    if isinstance(f, (Exists, Forall)):
        return type(f)(units_as_equalities(f.body, a, b), f.hint)
    if isinstance(f, (Mu, Nu)):
        bd = f.body
        return type(f)(Body(bd.arity, units_as_equalities(bd.formula, a, b),
                            bd.pred_hint, bd.hints), f.args)
    if isinstance(f, PredApp) and isinstance(f.pred, PredExpr):
        p = f.pred
        return PredApp(PredExpr(p.arity, units_as_equalities(p.body, a, b), p.hints),
                       f.args, f.positive)
    return f

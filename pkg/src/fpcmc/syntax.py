"""S-expression surface syntax for terms, formulas and predicate expressions.

Formulas::

    true+ false+ true- false-
    (and+ A B ...) (and- A B ...) (or A B ...) (imp A B)
    (= s t) (!= s t)
    (exists (x ...) A) (forall (x ...) A)
    (mu (lam (P x1 .. xn) A) t1 .. tn)   (nu ...)
    (P t1 .. tn)            application of a bound predicate variable
    (dual P t1 .. tn)       its de Morgan dual
    (app (lam (x ..) A) t ..)

Terms are symbols (bound variables shadow constants) or ``(f t ..)``;
``?N:L`` and ``!N:L`` denote logic and eigen variables.
"""

from __future__ import annotations

import re
from typing import Union

from .terms import (
    AndNeg, AndPos, Body, BVar, Const, EigenVar, Eq, Exists, FALSE_NEG, FALSE_POS,
    FalseNeg, FalsePos, Forall, Formula, Imp, LogicVar, Mu, Neq, Nu, Or, PredApp,
    PredExpr, PVar, TRUE_NEG, TRUE_POS, Term, TrueNeg, TruePos, check_arities,
)

SExp = Union[str, list]


class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"[()]|[^\s()]+")


def read_all(text: str) -> list:
    """Read every s-expression in ``text``; ``;`` starts a line comment."""
    tokens = []
    for line in text.splitlines():
        tokens.extend(_TOKEN.findall(line.split(";", 1)[0]))
    out: list = []
    stack: list = []
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'")
            done = stack.pop()
            (stack[-1] if stack else out).append(done)
        else:
            (stack[-1] if stack else out).append(tok)
    if stack:
        raise ParseError("unbalanced '('")
    return out


def read(text: str) -> SExp:
    items = read_all(text)
    if len(items) != 1:
        raise ParseError(f"expected one s-expression, found {len(items)}")
    return items[0]


def show(s: SExp) -> str:
    if isinstance(s, str):
        return s
    return "(" + " ".join(show(x) for x in s) + ")"


# ---------------------------------------------------------------------------
# parsing

_KEYWORDS = {
    "true+", "false+", "true-", "false-", "and+", "and-", "or", "imp", "=", "!=",
    "exists", "forall", "mu", "nu", "lam", "dual", "app", "dual-app",
}
_VAR = re.compile(r"^([?!])(\d+):(\d+)$")


class _Scope:
    def __init__(self, terms=(), preds=()):
        self.terms = list(terms)   # innermost last
        self.preds = list(preds)   # (name, arity, positive), innermost last

    def bind(self, names):
        return _Scope(self.terms + list(names), self.preds)

    def bind_pred(self, name, arity, positive, names):
        return _Scope(self.terms + list(names), self.preds + [(name, arity, positive)])

    def term_index(self, name):
        for i, n in enumerate(reversed(self.terms)):
            if n == name:
                return i
        return None

    def pred(self, name):
        for i, p in enumerate(reversed(self.preds)):
            if p[0] == name:
                return i, p
        return None


def _names(s: SExp, what: str) -> list:
    if not isinstance(s, list) or not all(isinstance(x, str) for x in s):
        raise ParseError(f"expected a list of {what}")
    return s


def parse_term(s: SExp, scope: _Scope | None = None) -> Term:
    scope = scope or _Scope()
    if isinstance(s, str):
        m = _VAR.match(s)
        if m:
            cls = LogicVar if m.group(1) == "?" else EigenVar
            return cls(int(m.group(2)), int(m.group(3)))
        if s in _KEYWORDS:
            raise ParseError(f"keyword {s!r} used as a term")
        i = scope.term_index(s)
        return BVar(i) if i is not None else Const(s)
    if not s or not isinstance(s[0], str):
        raise ParseError(f"bad term {show(s)}")
    return Const(s[0], tuple(parse_term(a, scope) for a in s[1:]))


def _nary(cls, args, scope):
    if len(args) < 2:
        raise ParseError(f"{cls.__name__} needs at least two operands")
    fs = [_formula(a, scope) for a in args]
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = cls(f, out)
    return out


def _fixed_point(kind, args, scope):
    if not args or not isinstance(args[0], list) or len(args[0]) != 3 or args[0][0] != "lam":
        raise ParseError(f"{kind.__name__.lower()} expects (lam (P x ..) body) and terms")
    params = _names(args[0][1], "parameters")
    if not params:
        raise ParseError("fixed-point body needs a predicate variable")
    pname, tnames = params[0], params[1:]
    inner = scope.bind_pred(pname, len(tnames), kind is Mu, tnames)
    body = Body(len(tnames), _formula(args[0][2], inner), pname, tuple(tnames))
    terms = tuple(parse_term(t, scope) for t in args[1:])
    if len(terms) != body.arity:
        raise ParseError("fixed point applied to the wrong number of terms")
    return kind(body, terms)


def _formula(s: SExp, scope: _Scope) -> Formula:
    if isinstance(s, str):
        units = {"true+": TRUE_POS, "false+": FALSE_POS, "true-": TRUE_NEG, "false-": FALSE_NEG}
        if s in units:
            return units[s]
        hit = scope.pred(s)
        if hit and hit[1][1] == 0:
            return PredApp(PVar(hit[0]), (), hit[1][2])
        raise ParseError(f"unknown formula {s!r}")
    if not s:
        raise ParseError("empty formula")
    head, args = s[0], s[1:]
    if isinstance(head, list):
        raise ParseError(f"bad formula head in {show(s)}")
    if head == "and+":
        return _nary(AndPos, args, scope)
    if head == "and-":
        return _nary(AndNeg, args, scope)
    if head == "or":
        return _nary(Or, args, scope)
    if head == "imp":
        if len(args) != 2:
            raise ParseError("imp takes two operands")
        return Imp(_formula(args[0], scope), _formula(args[1], scope))
    if head in ("=", "!="):
        if len(args) != 2:
            raise ParseError(f"{head} takes two terms")
        cls = Eq if head == "=" else Neq
        return cls(parse_term(args[0], scope), parse_term(args[1], scope))
    if head in ("exists", "forall"):
        if len(args) != 2:
            raise ParseError(f"{head} takes a variable list and a body")
        names = _names(args[0], "variables")
        body = _formula(args[1], scope.bind(names))
        cls = Exists if head == "exists" else Forall
        for n in reversed(names):
            body = cls(body, n)
        return body
    if head == "mu":
        return _fixed_point(Mu, args, scope)
    if head == "nu":
        return _fixed_point(Nu, args, scope)
    if head in ("app", "dual-app"):
        if not args:
            raise ParseError("app needs a predicate")
        pred = parse_pred(args[0], scope)
        terms = tuple(parse_term(t, scope) for t in args[1:])
        if len(terms) != pred.arity:
            raise ParseError("predicate applied to the wrong number of terms")
        return PredApp(pred, terms, head == "app")
    positive = True
    if head == "dual":
        if not args or not isinstance(args[0], str):
            raise ParseError("dual expects a predicate variable")
        positive, head, args = False, args[0], args[1:]
    hit = scope.pred(head)
    if hit is None:
        raise ParseError(f"unknown connective or predicate {head!r}")
    index, (_, arity, decl) = hit
    if len(args) != arity:
        raise ParseError(f"{head} expects {arity} arguments")
    return PredApp(PVar(index), tuple(parse_term(t, scope) for t in args),
                   decl if positive else not decl)


def parse_pred(s: SExp, scope: _Scope | None = None) -> PredExpr:
    if isinstance(s, str):
        s = read(s)
    if not isinstance(s, list) or len(s) != 3 or s[0] != "lam":
        raise ParseError("expected (lam (x ..) body)")
    names = _names(s[1], "parameters")
    body = _formula(s[2], _Scope(names))
    return PredExpr(len(names), body, tuple(names))


def parse_formula(text: Union[str, SExp]) -> Formula:
    s = read(text) if isinstance(text, str) else text
    f = _formula(s, _Scope())
    check_arities(f)
    return f


# ---------------------------------------------------------------------------
# printing


def _constants(f, acc: set) -> set:
    def terms_of(t):
        if isinstance(t, Const):
            acc.add(t.name)
            for a in t.args:
                terms_of(a)

    if isinstance(f, (Eq, Neq)):
        terms_of(f.left)
        terms_of(f.right)
    elif isinstance(f, (AndPos, AndNeg, Or, Imp)):
        _constants(f.left, acc)
        _constants(f.right, acc)
    elif isinstance(f, (Exists, Forall)):
        _constants(f.body, acc)
    elif isinstance(f, (Mu, Nu)):
        for a in f.args:
            terms_of(a)
        _constants(f.body.formula, acc)
    elif isinstance(f, PredApp):
        for a in f.args:
            terms_of(a)
        if isinstance(f.pred, PredExpr):
            _constants(f.pred.body, acc)
    return acc


class _Printer:
    def __init__(self, avoid: set):
        self.avoid = set(avoid) | _KEYWORDS

    def fresh(self, hint: str, taken: list) -> str:
        base = hint if hint and not _VAR.match(hint) else "x"
        if base not in self.avoid and base not in taken:
            return base
        i = 1
        while f"{base}{i}" in self.avoid or f"{base}{i}" in taken:
            i += 1
        return f"{base}{i}"

    def term(self, t: Term, tnames: list) -> str:
        if isinstance(t, BVar):
            if t.index >= len(tnames):
                raise ValueError("free bound variable while printing")
            return tnames[-1 - t.index]
        if isinstance(t, Const):
            if not t.args:
                return t.name
            return "(" + " ".join([t.name] + [self.term(a, tnames) for a in t.args]) + ")"
        return str(t)

    def formula(self, f: Formula, tnames: list, pnames: list) -> str:
        if isinstance(f, TruePos):
            return "true+"
        if isinstance(f, FalsePos):
            return "false+"
        if isinstance(f, TrueNeg):
            return "true-"
        if isinstance(f, FalseNeg):
            return "false-"
        for cls, kw in ((AndPos, "and+"), (AndNeg, "and-"), (Or, "or")):
            if isinstance(f, cls):
                parts = [self.formula(f.left, tnames, pnames)]
                g = f.right
                while isinstance(g, cls):
                    parts.append(self.formula(g.left, tnames, pnames))
                    g = g.right
                parts.append(self.formula(g, tnames, pnames))
                return f"({kw} " + " ".join(parts) + ")"
        if isinstance(f, Imp):
            return (f"(imp {self.formula(f.left, tnames, pnames)} "
                    f"{self.formula(f.right, tnames, pnames)})")
        if isinstance(f, (Eq, Neq)):
            op = "=" if isinstance(f, Eq) else "!="
            return f"({op} {self.term(f.left, tnames)} {self.term(f.right, tnames)})"
        if isinstance(f, (Exists, Forall)):
            kw = "exists" if isinstance(f, Exists) else "forall"
            names: list = []
            g = f
            while isinstance(g, type(f)):
                names.append(self.fresh(g.hint, tnames + names + [n for n, _ in pnames]))
                g = g.body
            return f"({kw} ({' '.join(names)}) {self.formula(g, tnames + names, pnames)})"
        if isinstance(f, (Mu, Nu)):
            kw = "mu" if isinstance(f, Mu) else "nu"
            b = f.body
            taken = tnames + [n for n, _ in pnames]
            pname = self.fresh(b.pred_hint, taken)
            names: list = []
            for i in range(b.arity):
                hint = b.hints[i] if i < len(b.hints) else "x"
                names.append(self.fresh(hint, taken + names + [pname]))
            inner = self.formula(b.formula, tnames + names,
                                 pnames + [(pname, isinstance(f, Mu))])
            args = "".join(" " + self.term(a, tnames) for a in f.args)
            return f"({kw} (lam ({' '.join([pname] + names)}) {inner}){args})"
        if isinstance(f, PredApp):
            args = "".join(" " + self.term(a, tnames) for a in f.args)
            if isinstance(f.pred, PredExpr):
                kw = "app" if f.positive else "dual-app"
                return f"({kw} {self.pred(f.pred)}{args})"
            name, decl = pnames[-1 - f.pred.index]
            # the polarity flag is printed relative to the binder's declaration
            return f"({name}{args})" if f.positive == decl else f"(dual {name}{args})"
        raise TypeError(f"not a formula: {f!r}")

    def pred(self, p: PredExpr) -> str:
        names: list = []
        for i in range(p.arity):
            hint = p.hints[i] if i < len(p.hints) else "x"
            names.append(self.fresh(hint, names))
        return f"(lam ({' '.join(names)}) {self.formula(p.body, names, [])})"


def show_term(t: Term) -> str:
    return _Printer(set()).term(t, [])


def show_formula(f: Formula) -> str:
    return _Printer(_constants(f, set())).formula(f, [], [])


def show_pred(p: PredExpr) -> str:
    return _Printer(_constants(p.body, set())).pred(p)

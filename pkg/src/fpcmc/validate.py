"""An independent checker for certificate-free derivations.

It re-derives the expected premises of every rule instance from its
conclusion, with its own unifier for the equality rules, and checks the side
conditions: eigenvariable freshness, store polarity, one formula at every
phase switch, and the model-checking restriction on (co)induction.
"""

from __future__ import annotations

from . import terms as T
from .kernel import AsyncSeq, Derivation, FocusL, FocusR, gc_paused
from .terms import (
    AndNeg, AndPos, Const, EigenVar, Eq, Exists, FalseNeg, FalsePos, Forall, Imp, Mu, Neq,
    Nu, Or, TrueNeg, TruePos,
)


class _Bad(Exception):
    pass


def _need(cond, msg):
    if not cond:
        raise _Bad(msg)


# -- a small Robinson unifier over eigenvariables ---------------------------


def _walk(t, s):
    while isinstance(t, EigenVar) and t in s:
        t = s[t]
    return t


def _full(t, s):
    t = _walk(t, s)
    if isinstance(t, Const) and t.args:
        return Const(t.name, tuple(_full(a, s) for a in t.args))
    return t


def _occ(v, t, s):
    t = _walk(t, s)
    if t == v:
        return True
    return isinstance(t, Const) and any(_occ(v, a, s) for a in t.args)


def mgu(a, b, s=None):
    s = dict(s or {})
    a, b = _walk(a, s), _walk(b, s)
    if a == b:
        return s
    if isinstance(a, EigenVar):
        return None if _occ(a, b, s) else {**s, a: b}
    if isinstance(b, EigenVar):
        return mgu(b, a, s)
    if isinstance(a, Const) and isinstance(b, Const) and a.name == b.name \
            and len(a.args) == len(b.args):
        for x, y in zip(a.args, b.args):
            s = mgu(x, y, s)
            if s is None:
                return None
        return {k: _full(v, s) for k, v in s.items()}
    return None


def _subst(s, f):
    return T.map_terms(f, lambda v: _full(v, s))


def _same_unifier(sigma, theta) -> bool:
    dom = set(sigma) | set(theta)
    return all(_full(_full(v, theta), sigma) == _full(v, sigma) and
               _full(_full(v, sigma), theta) == _full(v, theta) for v in dom)


def _seq_vars(seq) -> set:
    out = set()
    for f in seq.formulas():
        out |= T.formula_vars(f)
    return out


def _map(seq, fn):
    if isinstance(seq, AsyncSeq):
        return AsyncSeq(*(tuple(map(fn, z)) for z in (seq.nstore, seq.left, seq.right, seq.pstore)))
    return type(seq)(fn(seq.formula))


# -- per-rule checks -------------------------------------------------------


def _premises(d: Derivation) -> list:
    """The premises the rule must have, computed from the conclusion alone."""
    seq, rule, data = d.sequent, d.rule, d.data
    if isinstance(seq, AsyncSeq):
        n, g, r, p = seq.nstore, seq.left, seq.right, seq.pstore
        _need(all(not T.is_positive(f) for f in n), "positive formula in the negative store")
        _need(all(T.is_positive(f) for f in p), "negative formula in the positive store")
        if g:
            return _left(d, g[0], n, g[1:], r, p)
        if r:
            return _right(d, r[-1], n, g, r[:-1], p)
        _need(rule in ("decide_l", "decide_r"), f"{rule} on a sequent with empty zones")
        _need(len(n) + len(p) == 1, f"phase switch with {len(n) + len(p)} formulas")
        if rule == "decide_l":
            _need(len(n) == 1, "decide_l without a negative formula")
            return [FocusL(n[0])]
        _need(len(p) == 1, "decide_r without a positive formula")
        return [FocusR(p[0])]
    a = seq.formula
    if isinstance(seq, FocusR):
        if not T.is_positive(a):
            _need(rule == "release_r", f"{rule} on a right-focused negative formula")
            return [AsyncSeq(right=(a,))]
        if isinstance(a, Eq):
            _need(rule == "eq_r" and a.left == a.right, "right-focused equality not closed")
            return []
        if isinstance(a, TruePos):
            _need(rule == "true_pos_r", "bad rule on true+")
            return []
        if isinstance(a, AndPos):
            _need(rule == "and_pos_r", "bad rule on and+")
            return [FocusR(a.left), FocusR(a.right)]
        if isinstance(a, Or):
            _need(rule == "or_r" and data[0] in (1, 2), "bad rule on or")
            return [FocusR(a.left if data[0] == 1 else a.right)]
        if isinstance(a, Exists):
            _need(rule == "exists_r", "bad rule on exists")
            return [FocusR(T.open_binder(a, data[0]))]
        if isinstance(a, Mu):
            _need(rule == "mu_r", "bad rule on mu")
            return [FocusR(T.unfold(a))]
        raise _Bad(f"{rule} on a right-focused {type(a).__name__}")
    if T.is_positive(a):
        _need(rule == "release_l", f"{rule} on a left-focused positive formula")
        return [AsyncSeq(left=(a,))]
    if isinstance(a, Neq):
        _need(rule == "neq_l" and a.left == a.right, "left-focused disequality not closed")
        return []
    if isinstance(a, FalseNeg):
        _need(rule == "false_neg_l", "bad rule on false-")
        return []
    if isinstance(a, Imp):
        _need(rule == "imp_l", "bad rule on imp")
        return [FocusR(a.left), FocusL(a.right)]
    if isinstance(a, AndNeg):
        _need(rule == "and_neg_l" and data[0] in (1, 2), "bad rule on and-")
        return [FocusL(a.left if data[0] == 1 else a.right)]
    if isinstance(a, Forall):
        _need(rule == "forall_l", "bad rule on forall")
        return [FocusL(T.open_binder(a, data[0]))]
    if isinstance(a, Nu):
        _need(rule == "nu_l", "bad rule on nu")
        return [FocusL(T.unfold(a))]
    raise _Bad(f"{rule} on a left-focused {type(a).__name__}")


def _fresh(d: Derivation, ys) -> None:
    seen = _seq_vars(d.sequent)
    _need(all(isinstance(y, EigenVar) for y in ys), "eigenvariable expected")
    _need(len(set(ys)) == len(ys), "eigenvariables not distinct")
    _need(not (set(ys) & seen), "eigenvariable not fresh")


def _equality(d, a, ctx):
    sigma = mgu(a.left, a.right)
    if sigma is None:
        _need(not d.premises, "clashing equality must close the branch")
        return []
    _need(d.premises, "unifiable equality cannot close the branch")
    theta = dict(d.data[0]) if d.data else {}
    _need(_full(a.left, theta) == _full(a.right, theta), "recorded substitution does not unify")
    _need(_same_unifier(sigma, theta), "recorded substitution is not most general")
    return [_map(ctx, lambda f: _subst(theta, f))]


def _restricted(n, left_rest, right_rest, p):
    _need(not n and not p, "(co)induction with a non-empty store")
    _need(all(T.purely_positive(f) for f in left_rest), "(co)induction beside an impure left formula")
    _need(all(T.purely_negative(f) for f in right_rest), "(co)induction beside an impure right formula")


def _left(d, a, n, rest, r, p):
    rule = d.rule
    if not T.is_positive(a):
        _need(rule == "store_l", f"{rule} on a negative left formula")
        return [AsyncSeq(n + (a,), rest, r, p)]
    if isinstance(a, Eq):
        _need(rule == "eq_l", "bad rule on a left equality")
        return _equality(d, a, AsyncSeq(n, rest, r, p))
    if isinstance(a, TruePos):
        _need(rule == "true_pos_l", "bad rule on true+")
        return [AsyncSeq(n, rest, r, p)]
    if isinstance(a, FalsePos):
        _need(rule == "false_pos_l", "bad rule on false+")
        return []
    if isinstance(a, AndPos):
        _need(rule == "and_pos_l", "bad rule on and+")
        return [AsyncSeq(n, (a.left, a.right) + rest, r, p)]
    if isinstance(a, Or):
        _need(rule == "or_l", "bad rule on or")
        return [AsyncSeq(n, (a.left,) + rest, r, p), AsyncSeq(n, (a.right,) + rest, r, p)]
    if isinstance(a, Exists):
        _need(rule == "exists_l", "bad rule on exists")
        (y,) = d.data
        _fresh(d, (y,))
        return [AsyncSeq(n, (T.open_binder(a, y),) + rest, r, p)]
    if isinstance(a, Mu):
        if rule == "mu_l":
            return [AsyncSeq(n, (T.unfold(a),) + rest, r, p)]
        _need(rule == "ind", f"{rule} on a left fixed point")
        s, ys = d.data
        _fresh(d, ys)
        _need(T.purely_negative(s.body), "induction invariant is not purely negative")
        _restricted(n, rest, r, p)
        return [AsyncSeq((), (T.apply_body(a.body, s, ys),), (T.apply_pred(s, ys),), ()),
                AsyncSeq(n, (T.apply_pred(s, a.args),) + rest, r, p)]
    raise _Bad(f"{rule} on a left {type(a).__name__}")


def _right(d, a, n, g, rest, p):
    rule = d.rule
    if T.is_positive(a):
        _need(rule == "store_r", f"{rule} on a positive right formula")
        return [AsyncSeq(n, g, rest, p + (a,))]
    if isinstance(a, Neq):
        _need(rule == "neq_r", "bad rule on a right disequality")
        return _equality(d, a, AsyncSeq(n, g, rest, p))
    if isinstance(a, FalseNeg):
        _need(rule == "false_neg_r", "bad rule on false-")
        return [AsyncSeq(n, g, rest, p)]
    if isinstance(a, TrueNeg):
        _need(rule == "true_neg_r", "bad rule on true-")
        return []
    if isinstance(a, Imp):
        _need(rule == "imp_r", "bad rule on imp")
        return [AsyncSeq(n, g + (a.left,), rest + (a.right,), p)]
    if isinstance(a, AndNeg):
        _need(rule == "and_neg_r", "bad rule on and-")
        return [AsyncSeq(n, g, rest + (a.left,), p), AsyncSeq(n, g, rest + (a.right,), p)]
    if isinstance(a, Forall):
        _need(rule == "forall_r", "bad rule on forall")
        (y,) = d.data
        _fresh(d, (y,))
        return [AsyncSeq(n, g, rest + (T.open_binder(a, y),), p)]
    if isinstance(a, Nu):
        if rule == "nu_r":
            return [AsyncSeq(n, g, rest + (T.unfold(a),), p)]
        _need(rule == "co_ind", f"{rule} on a right fixed point")
        s, ys = d.data
        _fresh(d, ys)
        _need(T.purely_positive(s.body), "co-invariant is not purely positive")
        _restricted(n, g, rest, p)
        return [AsyncSeq((), (T.apply_pred(s, ys),), (T.apply_body(a.body, s, ys, False),), ()),
                AsyncSeq(n, g, rest + (T.apply_pred(s, a.args),), p)]
    raise _Bad(f"{rule} on a right {type(a).__name__}")


def errors(d: Derivation) -> list:
    """Every rule instance of ``d`` that is not a correct inference."""
    out = []
    todo = [d]
    with gc_paused():
        _walk_all(todo, out)
    return out


def _walk_all(todo: list, out: list) -> None:
    while todo:
        node = todo.pop()
        try:
            want = _premises(node)
            got = [p.sequent for p in node.premises]
            _need(len(want) == len(got), f"{node.rule}: expected {len(want)} premises, found {len(got)}")
            for i, (w, g) in enumerate(zip(want, got)):
                _need(w == g,
                      f"{node.rule}: premise {i + 1} differs from the expected sequent")
        except _Bad as e:
            out.append(f"{node.rule}: {e}")
        except (ValueError, TypeError, IndexError) as e:
            out.append(f"{node.rule}: malformed rule instance ({e})")
        todo.extend(node.premises)


def is_valid(d: Derivation) -> bool:
    return not errors(d)

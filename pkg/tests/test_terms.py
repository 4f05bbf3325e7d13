from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpcmc import terms as T
from fpcmc.syntax import ParseError, parse_formula, parse_pred, read, show, show_formula
from fpcmc.terms import (
    FALSE_NEG, FALSE_POS, TRUE_NEG, TRUE_POS, AndNeg, AndPos, Body, BVar, Const, Eq, Exists,
    Forall, Imp, Mu, Neq, Nu, Or, PredApp, PVar, Polarity,
)

CONSTS = st.sampled_from([Const("a"), Const("b"), Const("c")])


def terms_at(depth: int):
    leaves = [CONSTS] + ([st.integers(0, depth - 1).map(BVar)] if depth else [])
    return st.one_of(*leaves)


@st.composite
def formulas(draw, depth: int = 0, size: int = 3, fixed_points: bool = True):
    """Closed formulas with ``depth`` enclosing term binders."""
    if size <= 0:
        return draw(st.one_of(
            st.sampled_from([TRUE_POS, FALSE_POS, TRUE_NEG, FALSE_NEG]),
            st.builds(Eq, terms_at(depth), terms_at(depth)),
            st.builds(Neq, terms_at(depth), terms_at(depth)),
        ))
    kind = draw(st.sampled_from(["bin", "bin", "quant", "leaf"] + (["fix"] if fixed_points else [])))
    if kind == "leaf":
        return draw(formulas(depth, 0))
    if kind == "bin":
        cls = draw(st.sampled_from([AndPos, AndNeg, Or, Imp]))
        return cls(draw(formulas(depth, size - 1, fixed_points)),
                   draw(formulas(depth, size - 1, fixed_points)))
    if kind == "quant":
        cls = draw(st.sampled_from([Exists, Forall]))
        return cls(draw(formulas(depth + 1, size - 1, fixed_points)))
    # a one-parameter fixed point whose body may recur once
    cls = draw(st.sampled_from([Mu, Nu]))
    inner = draw(formulas(depth + 1, size - 2, False))
    rec = PredApp(PVar(0), (BVar(0),), cls is Mu)
    body = Body(1, draw(st.sampled_from([Or, AndPos, AndNeg]))(inner, rec), "P", ("x",))
    return cls(body, (draw(terms_at(depth)),))


# -- polarity -----------------------------------------------------------------


def test_polarity_of_connectives():
    pos = [TRUE_POS, FALSE_POS, AndPos(TRUE_POS, TRUE_POS), Or(TRUE_POS, FALSE_POS),
           Eq(Const("a"), Const("a")), Exists(TRUE_POS)]
    neg = [TRUE_NEG, FALSE_NEG, AndNeg(TRUE_NEG, TRUE_NEG), Imp(TRUE_POS, FALSE_NEG),
           Neq(Const("a"), Const("b")), Forall(TRUE_NEG)]
    assert all(T.polarity(f) is Polarity.POSITIVE for f in pos)
    assert all(T.polarity(f) is Polarity.NEGATIVE for f in neg)


def test_purely_positive_formulas_switch_on_both_sides():
    f = parse_formula("(exists (x) (or (= x a) (and+ (= x b) (mu (lam (P y) (= y a)) x))))")
    assert T.purely_positive(f)
    assert T.switchable(f) and T.switchable(f, T.Side.LEFT)
    assert T.switchable(T.dual(f)) and T.switchable(T.dual(f), T.Side.LEFT)


def test_fixed_point_polarity():
    mu = parse_formula("(mu (lam (P x) (or (= x a) (P x))) a)")
    nu = parse_formula("(nu (lam (P x) (and+ (= x a) (P x))) a)")
    assert T.is_positive(mu)
    assert not T.is_positive(nu)


@given(formulas())
@settings(max_examples=100)
def test_dual_is_an_involution(f):
    assert T.dual(T.dual(f)) == f


@given(formulas())
@settings(max_examples=100)
def test_dual_flips_polarity(f):
    assert T.polarity(T.dual(f)) is T.polarity(f).flip()


@given(formulas())
@settings(max_examples=100)
def test_dual_exchanges_purities(f):
    assert T.purely_positive(f) == T.purely_negative(T.dual(f))


# -- switchability --------------------------------------------------------------


def test_switchable_examples():
    enc = "(nu (lam (S p) (forall (q) (imp (= p q) (exists (r) (and+ (= q r) (S r)))))) a)"
    assert T.switchable(parse_formula(enc))
    assert T.switchable(parse_formula(f"(imp {enc} false-)"))
    nu = "(nu (lam (S x) (and- (= x a) (S x))) a)"
    # and+ under one implication with neither conjunct purely positive
    assert not T.switchable(parse_formula(f"(imp (and+ {nu} {nu}) false-)"))
    assert not T.switchable(parse_formula(f"(and+ {nu} {nu})"), T.Side.LEFT)
    # imp whose antecedent is not purely positive and whose consequent is not purely negative
    assert not T.switchable(parse_formula("(imp (forall (x) (= x a)) (exists (y) (= y a)))"))
    assert T.switchable(parse_formula("(exists (x) (and+ (= x a) (forall (y) (= x y))))"))


def test_purity():
    assert T.purely_positive(parse_formula("(exists (x) (or (= x a) (and+ (= x b) true+)))"))
    assert not T.purely_positive(parse_formula("(exists (x) (imp (= x a) false-))"))
    assert T.purely_negative(parse_formula("(forall (x) (imp (= x a) false-))"))


# -- binders ----------------------------------------------------------------------


def test_open_binder_substitutes_the_innermost_variable():
    f = parse_formula("(forall (x y) (= x y))")
    assert T.open_binder(f, Const("a")) == Forall(Eq(Const("a"), BVar(0)), "y")
    g = T.open_binder(T.open_binder(f, Const("a")), Const("b"))
    assert g == Eq(Const("a"), Const("b"))


def test_unfold_mu_once():
    f = parse_formula("(mu (lam (P x) (or (= x a) (P x))) b)")
    out = T.unfold(f)
    assert out == Or(Eq(Const("b"), Const("a")), f)


def test_unfold_nu_keeps_the_recursive_occurrence():
    f = parse_formula("(nu (lam (S x) (and+ (= x a) (S x))) b)")
    assert T.unfold(f) == AndPos(Eq(Const("b"), Const("a")), f)


def test_dual_reference_in_body_unfolds_to_dual():
    f = parse_formula("(mu (lam (P x) (or (= x a) (dual P x))) b)")
    right = T.unfold(f).right
    assert right == T.dual(f)


def test_apply_pred_and_beta():
    s = parse_pred("(lam (x y) (or (= x a) (= y b)))")
    got = T.apply_pred(s, (Const("c"), Const("d")))
    assert got == Or(Eq(Const("c"), Const("a")), Eq(Const("d"), Const("b")))
    with pytest.raises(T.ArityError):
        T.apply_pred(s, (Const("c"),))
    app = PredApp(s, (Const("c"), Const("d")), False)
    assert T.beta(app) == T.dual(got)


@given(formulas(depth=1, size=3))
@settings(max_examples=100)
def test_instantiation_closes_a_formula(f):
    g = T.instantiate(f, [Const("k")])
    assert T.formula_vars(g) == set()
    assert not any(isinstance(t, BVar) for t in _free_terms(g, 0))


def _free_terms(f, depth):
    # BVars pointing outside ``f``
    out = []

    def term(t, d):
        if isinstance(t, BVar) and t.index >= d:
            out.append(t)
        elif isinstance(t, Const):
            for a in t.args:
                term(a, d)

    def walk(g, d):
        if isinstance(g, (Eq, Neq)):
            term(g.left, d)
            term(g.right, d)
        elif isinstance(g, (AndPos, AndNeg, Or, Imp)):
            walk(g.left, d)
            walk(g.right, d)
        elif isinstance(g, (Exists, Forall)):
            walk(g.body, d + 1)
        elif isinstance(g, (Mu, Nu)):
            for t in g.args:
                term(t, d)
            walk(g.body.formula, d + g.body.arity)
        elif isinstance(g, PredApp):
            for t in g.args:
                term(t, d)
    walk(f, depth)
    return out


def test_var_kinds_and_map_terms():
    x, e = T.LogicVar(1, 0), T.EigenVar(2, 1)
    f = AndPos(Eq(x, Const("a")), Exists(Eq(BVar(0), e)))
    assert T.var_kinds(f) == (True, True)
    assert T.logic_vars(f) == frozenset({x})
    g = T.map_terms(f, lambda v: Const("z") if v == x else v)
    assert g == AndPos(Eq(Const("z"), Const("a")), Exists(Eq(BVar(0), e)))
    assert T.var_kinds(g) == (False, True)
    closed = AndPos(Eq(Const("a"), Const("b")), TRUE_POS)
    assert T.map_terms(closed, lambda v: Const("z")) is closed


def test_check_arities():
    with pytest.raises(ParseError):
        parse_formula("(mu (lam (P x) (P x x)) a)")


# -- syntax -------------------------------------------------------------------------


@given(formulas())
@settings(max_examples=150)
def test_print_parse_round_trip(f):
    assert parse_formula(show_formula(f)) == f


def test_sexp_round_trip():
    s = read("(a (b c) (d (e)) f)")
    assert s == ["a", ["b", "c"], ["d", ["e"]], "f"]
    assert read(show(s)) == s


@pytest.mark.parametrize("text", ["(and+ true+)", "(= a)", "(foo a)", "(forall x true+)",
                                  "((and+) a)", "(mu (P x) a)", "(a", "a)", ""])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_formula(text)


def test_units_as_equalities():
    a, b = Const("a"), Const("b")
    f = AndNeg(TRUE_NEG, Or(FALSE_POS, Imp(TRUE_POS, FALSE_NEG)))
    assert T.units_as_equalities(f) == AndNeg(Neq(a, b), Or(Eq(a, b), Imp(Eq(a, a), Neq(a, a))))

from __future__ import annotations

import dataclasses
import re

import pytest

from fpcmc import fpc as F
from fpcmc import golden
from fpcmc.kernel import (
    AsyncSeq, FocusL, FocusR, FpcTable, InvariantViolation, KernelError, Step, check, digest, erase,
    goal_sequent, phase_switch_violations, show_sequent,
)
from fpcmc.syntax import parse_formula
from fpcmc.terms import TRUE_NEG, TRUE_POS, Const, EigenVar, Eq
from fpcmc.validate import errors, is_valid

CASES = golden.POSITIVE + golden.NEGATIVE


@pytest.mark.parametrize("case", CASES, ids=[c.name for c in CASES])
def test_reference_verdicts(case):
    assert golden.run(case).accepted == case.accept


@pytest.mark.parametrize("case", golden.POSITIVE, ids=[c.name for c in golden.POSITIVE])
def test_accepted_traces_erase_to_valid_proofs(case):
    r = golden.run(case)
    d = erase(r.trace)
    assert d.size() == len(r.trace)
    assert errors(d) == []
    assert phase_switch_violations(r.trace) == []


def _tamper(trace, i, **changes):
    out = list(trace)
    out[i] = dataclasses.replace(out[i], **changes)
    return out


def test_validator_catches_a_forged_branch_choice():
    r = golden.run(golden.POSITIVE[0])
    i = next(i for i, s in enumerate(r.trace) if s.rule == "or_r")
    bad = _tamper(r.trace, i, data=(3 - r.trace[i].data[0],))
    assert not is_valid(erase(bad))


def test_validator_catches_a_forged_witness():
    r = golden.run(golden.POSITIVE[0])
    i = next(i for i, s in enumerate(r.trace) if s.rule == "exists_r")
    bad = _tamper(r.trace, i, data=(Const("d"),))
    assert not is_valid(erase(bad))


def test_validator_catches_a_forged_equality_closure():
    r = golden.run(golden.POSITIVE[0])
    i = next(i for i, s in enumerate(r.trace) if s.rule == "eq_r")
    bad = _tamper(r.trace, i, sequent=FocusR(Eq(Const("a"), Const("b"))))
    assert not is_valid(erase(bad))


def test_validator_catches_a_non_fresh_eigenvariable():
    r = golden.run(golden.POSITIVE[-1])
    i = next(i for i, s in enumerate(r.trace) if s.rule == "forall_r")
    y = r.trace[i].data[0]
    seq = r.trace[i].sequent
    # put the eigenvariable into the conclusion so it is no longer fresh
    stale = AsyncSeq(seq.nstore, seq.left, seq.right, (Eq(y, y),))
    bad = _tamper(r.trace, i, sequent=stale)
    assert any("fresh" in e or "differs" in e for e in errors(erase(bad)))


def test_erase_rejects_leftover_steps():
    r = golden.run(golden.POSITIVE[0])
    with pytest.raises(KernelError):
        erase(r.trace + r.trace[-1:])


def test_phase_switch_violation_is_detected():
    bad = Step("decide_r", AsyncSeq(pstore=(TRUE_POS, TRUE_POS)), F.STOP, 1, ())
    good = Step("decide_r", AsyncSeq(pstore=(TRUE_POS,)), F.STOP, 1, ())
    assert phase_switch_violations([bad, good]) == [bad]


def test_non_switchable_goal_is_refused():
    nu = "(nu (lam (S x) (and- (= x a) (S x))) a)"
    goal = parse_formula(f"(imp (and+ {nu} {nu}) false-)")
    with pytest.raises(InvariantViolation):
        check(F.common_table(), F.DECPROC, goal)


def test_depth_bound_reports_exhaustion():
    case = golden.Case("loops.lts", "sim 21 23", "decproc", True)
    assert golden.run(case, depth=300).status == "exhausted"


def test_depth_must_be_positive():
    with pytest.raises(ValueError):
        check(F.common_table(), F.STOP, TRUE_NEG, depth=0)


def test_rules_without_premises_need_no_clerk():
    empty = FpcTable("empty")
    assert check(empty, F.STOP, TRUE_NEG).accepted
    # anything needing a decision or a clerk answer is refused
    for text in ["(= a a)", "(imp false+ false-)", "(and- true- true-)"]:
        assert check(empty, F.STOP, parse_formula(text)).status == "rejected"


def test_stop_only_proves_what_needs_no_rules_with_clerks():
    t = F.common_table()
    assert not check(t, F.STOP, parse_formula("(imp false+ false-)")).accepted
    assert check(t, F.Async(F.STOP), parse_formula("(imp false+ false-)")).accepted


def test_trace_lines_are_stable():
    a = golden.run(golden.POSITIVE[1]).lines()
    b = golden.run(golden.POSITIVE[1]).lines()
    assert a == b
    assert all(re.fullmatch(r"[a-z_]+ [0-9a-f]{12} [0-9a-f]{12}", line) for line in a)


def test_digest_is_short_sha1():
    assert digest("x") == "11f6ad8ec52a"


def test_show_sequent_shapes():
    f = parse_formula("(= a b)")
    assert "=" in show_sequent(FocusR(f))
    assert "=" in show_sequent(FocusL(f))
    assert show_sequent(goal_sequent(f)).count("a") == 1


def test_left_equality_applies_the_unifier_to_the_context():
    e = EigenVar(1, 1)
    goal = AsyncSeq(left=(Eq(e, Const("a")),), right=(Eq(e, Const("a")),))
    r = check(F.common_table(), F.DECPROC, goal, require_switchable=False)
    assert r.accepted
    step = r.trace[0]
    assert step.rule == "eq_l" and dict(step.data[0]) == {e: Const("a")}
    assert is_valid(erase(r.trace))


def test_clashing_left_equality_closes_the_branch():
    goal = AsyncSeq(left=(Eq(Const("a"), Const("b")),), right=(parse_formula("false+"),))
    r = check(F.common_table(), F.DECPROC, goal, require_switchable=False)
    assert r.accepted and [s.rule for s in r.trace] == ["eq_l"]

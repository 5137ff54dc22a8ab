from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import oracles
from conftest import term_literals
from ordacc.candidate import (
    HypothesisViolation,
    base_step,
    concrete_witnesses,
    marked,
    parse_term,
    renorm_power,
    space_of,
    zero_term,
)
from ordacc.ordinal import OMEGA, Ordinal, parse
from ordacc.realize import realize
from ordacc.space import Ord, Pair, omega_space, rank
from ordacc.transfinite import (
    Budget,
    NoClosedForm,
    Oracle,
    TransfiniteProfile,
    Unknown,
    alpha0_global,
    alpha0_point,
    check_global_bound,
    check_pointwise_bound,
    check_subadditivity,
    full_witnesses,
    profile_closed_form,
    u_eval,
    u_norm,
    verify_profile,
)

w = OMEGA
B1 = base_step(1)


def O(n):
    return Ord(Ordinal.of(n))


# ------------------------------------------------------------------ examples


def test_base_step_sequence():
    a = Fraction(3, 2)
    B = base_step(a)
    assert u_eval(B, 1, Ord(w)) == a
    assert u_eval(B, 0, O(4)) == 0
    assert u_norm(B, 1) == a
    assert u_norm(B, 0) == 0
    assert alpha0_point(B, O(5)) == 0
    assert alpha0_point(B, Ord(w)) == 1
    assert alpha0_global(B) == 1


def test_zero_sequence_stabilizes_at_once():
    assert alpha0_global(zero_term(omega_space(1, 1))) == 0


def test_renorm_power_norm_by_oracle_maximization():
    H = renorm_power(B1, 2)
    T = oracles.translate(H)
    assert oracles.grid_norm(T, 1) == Fraction(1, 2)
    assert u_norm(H, 1, method="oracle") == Fraction(1, 2)
    assert u_norm(H, 1, method="profile") == Fraction(1, 2)


def test_realize_two_marked_values():
    H, _ = realize(2, 1)
    T = oracles.translate(H)
    m = marked(H)
    assert [oracles.grid_u(T, ell, oracles.mark(T)) for ell in (1, 2)] == [Fraction(1, 2), 1]
    assert u_eval(H, 1, m, method="oracle") == Fraction(1, 2)
    assert u_eval(H, 2, m, method="oracle") == 1
    assert alpha0_point(H, m) == 2


def test_realize_omega_vanishes_below_alpha_at_marked_point():
    H, P = realize(w, 1)
    m = marked(H)
    assert u_eval(H, 3, m) == 0
    assert u_eval(H, w, m) == 1
    assert alpha0_global(H) == w


def test_oracle_reports_unknown_for_power_unions():
    H, _ = realize(w, 1)
    v = u_eval(H, 3, marked(H), method="oracle")
    assert isinstance(v, Unknown)
    with pytest.raises(TypeError):
        bool(v)


def test_tiny_budget_gives_unknown():
    H = renorm_power(B1, 3)
    v = u_eval(H, 3, marked(H), Budget(max_depth=16, max_evals=2), method="oracle")
    assert isinstance(v, Unknown)


# ------------------------------------------------------------------- profiles


def test_power_profile_before_renormalization():
    P = profile_closed_form(parse_term("prod(base(1),base(1))"))
    assert P.jumps == ((1, 1), (2, 2))
    assert P.alpha0 == 2


def test_union_of_shrinking_steps_profile():
    U = parse_term("union(base(1),from=1,c=1/n)")
    P = profile_closed_form(U)
    assert all(P.at_marked(g) == 0 for g in (0, 1, 2, w))
    assert P.norm(Ordinal.of(1)) == 1
    assert verify_profile(U, P, full_witnesses(U)).ok


def test_union_of_powers_profile_matches_members():
    # disjoint-union lemma: u(inf) at stage b is the limsup of member norms at b
    U = parse_term("powers(base(1),from=1,c=n/(n+1))")
    P = profile_closed_form(U)
    assert P.alpha0 == w
    assert P.at_marked(w) == 1
    for n in range(1, 5):
        member = renorm_power(B1, n)
        scale = Fraction(n, n + 1)
        for b in range(0, n + 2):
            assert P.norm(Ordinal.of(b)) >= scale * u_norm(member, b, method="oracle")
    for b in range(1, 4):
        assert P.at_marked(b) == 0
        # member norms at a fixed finite stage b tend to 0
        assert u_norm(renorm_power(B1, 40), b, method="oracle") * Fraction(40, 41) == Fraction(b, 41)


def test_verify_profile_examples():
    P = profile_closed_form(B1)
    assert verify_profile(B1, P, [O(0), Ord(w)]).ok
    H, P2 = realize(2, 1)
    report = verify_profile(H, P2, full_witnesses(H))
    assert report.ok
    marked_rows = {r["gamma"]: r["oracle"] for r in report.rows if r["what"] == "at_marked"}
    assert marked_rows["1"] == "1/2" and marked_rows["2"] == "1"


def test_corrupted_profile_is_reported():
    H, P = realize(2, 1)
    bad = TransfiniteProfile(((Ordinal.of(1), Fraction(1, 2)), (Ordinal.of(2), Fraction(3, 4))), P.norm, P.alpha0,
                             P.alpha0_marked)
    report = verify_profile(H, bad)
    assert not report.ok
    bad_rows = {(r["gamma"], r["what"], r["oracle"], r["profile"]) for r in report.mismatches()}
    assert ("2", "at_marked", "1", "3/4") in bad_rows
    assert all(r["what"] == "at_marked" for r in report.mismatches())


def test_product_lemma_violation_is_named():
    with pytest.raises(HypothesisViolation, match="product lemma"):
        profile_closed_form(parse_term("prod(base(2),base(1))"))
    assert profile_closed_form(parse_term("prod(base(1),base(2))")).alpha0 == 2


def test_profile_json_schema():
    _, P = realize(2, 1)
    doc = P.to_json()
    assert doc == {
        "alpha0": "2",
        "bound": "1",
        "breakpoints": [
            {"at_marked": "1/2", "gamma": "1", "norm": "1/2"},
            {"at_marked": "1", "gamma": "2", "norm": "1"},
        ],
    }


# ----------------------------------------------------------------- inequalities


def test_subadditivity_examples():
    H, _ = realize(2, 1)
    m = marked(H)
    assert u_eval(H, 2, m) == u_eval(H, 1, m) + u_eval(H, 1, m)
    assert check_subadditivity(H, 1, 1, [m])
    assert check_subadditivity(H, 0, 2, [m])
    assert check_subadditivity(B1, 1, 1, [Ord(w)])
    assert u_eval(B1, 2, Ord(w)) == 1


def test_pointwise_bound_examples():
    assert check_pointwise_bound(B1, Ord(w))
    assert check_pointwise_bound(B1, O(3))
    H, _ = realize(w, 1)
    m = marked(H)
    assert rank(space_of(H), m) == w
    assert alpha0_point(H, m) == w
    assert check_pointwise_bound(H, m)


# ------------------------------------------------------------------ properties

plain_terms = term_literals(3).map(parse_term)
grid_terms = term_literals(2).filter(lambda t: "union" not in t).map(parse_term)


def _to_library_point(x):
    if isinstance(x, tuple):
        return Pair(_to_library_point(x[0]), _to_library_point(x[1]))
    return Ord(w if x == oracles.W else Ordinal.of(x))


@given(grid_terms)
def test_oracle_agrees_with_concrete_index_recursion(H):
    T = oracles.translate(H)
    assume(len(oracles._coords(oracles.mark(T))) <= 4)
    O_ = Oracle(H)
    for x in oracles.grid_points(T):
        for ell in (1, 2, 3):
            assert O_.u(ell, _to_library_point(x)) == oracles.grid_u(T, ell, x)


@given(plain_terms)
def test_monotone_in_stage(H):
    for x in full_witnesses(H):
        vals = [u_eval(H, g, x, method="oracle") for g in range(4)]
        assert vals == sorted(vals)


@given(plain_terms)
def test_stabilizes_at_alpha0(H):
    a0 = alpha0_global(H, method="oracle")
    for x in full_witnesses(H):
        assert u_eval(H, a0, x, method="oracle") == u_eval(H, a0 + 1, x, method="oracle")
    if a0 >= 1:
        below = a0.predecessor()
        assert any(
            u_eval(H, below, x, method="oracle") < u_eval(H, a0, x, method="oracle") for x in full_witnesses(H)
        )


@given(plain_terms)
def test_usc_along_approach(H):
    O_ = Oracle(H)
    for x in concrete_witnesses(H):
        v = O_.u(2, x)
        assert v >= 0
    m = marked(H)
    assert O_.u(2, m) <= u_norm(H, 2, method="oracle")


@given(plain_terms)
def test_profile_matches_oracle_when_lemmas_apply(H):
    try:
        P = profile_closed_form(H)
    except (HypothesisViolation, NoClosedForm):
        return
    P.check_invariants()
    assert verify_profile(H, P, full_witnesses(H)).ok


@given(plain_terms, st.integers(0, 3), st.integers(0, 3))
def test_subadditivity_on_random_terms(H, a, b):
    assert check_subadditivity(H, a, b) is True


@given(plain_terms)
def test_accumulation_bounds_on_random_terms(H):
    for x in concrete_witnesses(H):
        assert check_pointwise_bound(H, x) is True
    assert check_global_bound(H, method="oracle") is True

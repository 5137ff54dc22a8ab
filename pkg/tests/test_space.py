import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from ordacc.ordinal import OMEGA, ZERO, Ordinal, fundamental_seq, parse
from ordacc.space import (
    AtInfinity,
    ComplementOfFinite,
    InFamily,
    IsolatedPoints,
    NonMemberError,
    Ord,
    Pair,
    canonical_class,
    cb_rank,
    format_point,
    format_space,
    is_member,
    marked_point,
    marked_product,
    omega_space,
    parse_point,
    parse_space,
    rank,
    relative_cb_rank,
    relative_rank,
    tail_basis,
    top_rank_count,
)

w = OMEGA
P = parse


def vec_to_ordinal(t: tuple) -> Ordinal:
    d = len(t) - 1
    return Ordinal([(Ordinal.of(d - i), c) for i, c in enumerate(t) if c])


# ------------------------------------------------------------- frozen values


def test_omega_space_basics():
    E = omega_space(1, 1)
    assert marked_point(E) == Ord(w)
    assert marked_point(omega_space(0, 1)) == Ord(Ordinal.of(1))
    with pytest.raises(ValueError):
        omega_space(1, 0)


def test_membership():
    E = omega_space(1, 1)
    assert is_member(E, Ord(Ordinal.of(5)))
    assert not is_member(E, Ord(P("w+1")))
    assert is_member(marked_product(E, E), Pair(Ord(Ordinal.of(2)), Ord(w)))


def test_rank_examples():
    assert rank(omega_space(2, 3), Ord(P("w^2*2"))) == 2
    assert rank(omega_space(1, 1), Ord(Ordinal.of(7))) == 0
    with pytest.raises(NonMemberError):
        rank(omega_space(1, 1), Ord(P("w*2")))


def test_rank_of_w5_in_w2_matches_truncation():
    # frozen from the truncated ordinal model of w^2+1
    assert oracles.omega_point_rank(2, 1, (0, 5, 0)) == 1
    assert rank(omega_space(2, 1), Ord(P("w*5"))) == 1


@pytest.mark.parametrize("alpha", [0, 1, 2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_finite_alpha_class_matches_truncation(alpha, n):
    expected = oracles.omega_space_class(alpha, n)
    E = omega_space(alpha, n)
    assert (cb_rank(E), top_rank_count(E)) == expected


def test_transfinite_alpha_class():
    # w^w*n+1: rank w+1 with n top points, as for every w^alpha*n+1 with alpha > 0
    for n in (1, 2, 3):
        assert canonical_class(omega_space(w, n)) == (P("w+1"), n)


def test_discrete_two_point_space():
    assert canonical_class(omega_space(0, 1)) == (1, 2)


def test_union_of_growing_powers_has_rank_w_plus_1():
    U = parse_space("union(omega(n,1), from=1)")
    members = [oracles.omega_space_class(n, 1)[0] for n in range(1, 4)]
    assert members == [2, 3, 4]
    assert cb_rank(U) == P("w+1")
    assert canonical_class(U) == canonical_class(omega_space(w, 1))


def test_union_of_w_multiples_is_w2_plus_1():
    U = parse_space("union(omega(1,n), from=1)")
    assert oracles.omega_space_class(2, 1) == (3, 1)
    assert canonical_class(U) == (3, 1)


def test_product_of_convergent_sequences():
    ranks = oracles.product_ranks()
    tops = [t for t, r in ranks.items() if r == max(ranks.values())]
    assert tops == [(oracles.W, oracles.W)]
    E = marked_product(omega_space(1, 1), omega_space(1, 1))
    assert top_rank_count(E) == 1
    assert cb_rank(E) == 3
    assert rank(E, Pair(Ord(w), Ord(Ordinal.of(4)))) == ranks[(oracles.W, 4)] == 1


def test_tail_basis_examples():
    E = omega_space(1, 1)
    nb = tail_basis(E, Ord(w), 5)
    assert [b for b in range(12) if nb.contains(Ord(Ordinal.of(b)))] == list(range(6, 12))
    U = parse_space("union(omega(1,n), from=1)")
    nb = tail_basis(U, AtInfinity(), 3)
    assert nb.contains(AtInfinity()) and nb.contains(InFamily(4, Ord(Ordinal.of(0))))
    assert not nb.contains(InFamily(3, Ord(w)))
    nb = tail_basis(omega_space(2, 1), Ord(P("w^2")), 2)
    assert nb.contains(Ord(P("w*2+1"))) and not nb.contains(Ord(P("w*2")))
    with pytest.raises(ValueError):
        tail_basis(E, Ord(Ordinal.of(3)), 1)


# ------------------------------------------------------------ relative ranks


def test_relative_rank_isolated_selector():
    iso = oracles.is_isolated_vec
    assert oracles.relative_point_rank(2, 1, iso, (0, 4, 0)) == 1
    assert oracles.relative_point_rank(2, 1, iso, (0, 0, 3)) == 0
    E = omega_space(2, 1)
    assert relative_rank(E, IsolatedPoints(), Ord(P("w*4"))) == 1
    assert relative_rank(E, IsolatedPoints(), Ord(Ordinal.of(3))) == 0


def test_relative_cb_ranks():
    assert oracles.relative_class(2, 1, oracles.is_isolated_vec) == 2
    assert relative_cb_rank(omega_space(2, 1), IsolatedPoints()) == 2

    assert oracles.relative_class(1, 1, lambda p: True) == 2
    assert relative_cb_rank(omega_space(1, 1), ComplementOfFinite()) == 2

    top = (1, 0)
    assert oracles.relative_class(1, 1, lambda p: p != top) == 2
    assert relative_cb_rank(omega_space(1, 1), ComplementOfFinite(frozenset({Ord(w)}))) == 2
    assert relative_rank(omega_space(1, 1), ComplementOfFinite(), Ord(w)) == 1


@pytest.mark.parametrize("alpha", [1, 2])
def test_relative_ranks_match_truncation_pointwise(alpha):
    iso = oracles.is_isolated_vec
    pts = oracles.truncated_omega_space(alpha, 2, 5)
    E = omega_space(alpha, 2)
    for t in pts:
        x = Ord(vec_to_ordinal(t))
        assert relative_rank(E, IsolatedPoints(), x) == oracles.relative_point_rank(alpha, 2, iso, t, M=5)
        assert relative_rank(E, ComplementOfFinite(), x) == rank(E, x)


# ----------------------------------------------------------------- literals


@pytest.mark.parametrize("text", ["omega(2,3)", "prod(omega(1,1),omega(w,2))", "union(omega(1,n), from=2)"])
def test_space_literal_round_trip(text):
    assert format_space(parse_space(text)) == text


@pytest.mark.parametrize("text", ["o:w^2*3", "inf", "in(4,o:w)", "pair(o:3,o:w)"])
def test_point_literal_round_trip(text):
    assert format_point(parse_point(text)) == text


# --------------------------------------------------------------- properties

small_alpha = st.sampled_from([ZERO, Ordinal.of(1), Ordinal.of(2), Ordinal.of(3), w, P("w+1")])


@given(small_alpha, st.integers(1, 4), st.integers(0, 40))
def test_point_rank_below_cb_rank(alpha, n, seed):
    E = omega_space(alpha, n)
    top = E.alpha
    candidates = [Ordinal.of(seed), P("w") if alpha >= 1 else Ordinal.of(0), marked_point(E).beta]
    for beta in candidates:
        x = Ord(beta)
        if is_member(E, x):
            assert rank(E, x) < cb_rank(E)
            assert relative_rank(E, IsolatedPoints(), x) <= rank(E, x)
    assert relative_cb_rank(E, ComplementOfFinite()) == cb_rank(E)
    assert rank(E, marked_point(E)) == top


@given(st.integers(1, 3), st.integers(1, 3))
def test_exactly_n_points_of_top_rank(alpha, n):
    pts = oracles.truncated_omega_space(alpha, n, 4)
    E = omega_space(alpha, n)
    tops = [t for t in pts if rank(E, Ord(vec_to_ordinal(t))) == alpha]
    assert len(tops) == n == top_rank_count(E)


def test_union_class_invariant_under_reindexing():
    a = parse_space("union(omega(1,n), from=1)")
    b = parse_space("union(omega(1,n), from=5)")
    assert canonical_class(a) == canonical_class(b)


@given(st.integers(0, 30), st.integers(0, 30))
def test_tail_basis_separates(i, m):
    E = omega_space(2, 1)
    x = Ord(P("w^2"))
    other = Ord(P(f"w*{m + 1}"))
    nb_small, nb_big = tail_basis(E, x, i), tail_basis(E, x, i + 1)
    assert nb_big.contains(x) and nb_small.contains(x)
    if nb_big.contains(other):
        assert nb_small.contains(other)
    assert not tail_basis(E, x, m + 2).contains(other)


def test_in_family_points_are_checked():
    U = parse_space("union(omega(1,n), from=1)")
    assert is_member(U, InFamily(3, Ord(P("w*3"))))
    assert not is_member(U, InFamily(0, Ord(Ordinal.of(0))))

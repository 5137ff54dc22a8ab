from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ordacc.candidate import Product, Shift, base_step, concrete_witnesses, eval_tau, marked, space_of
from ordacc.ordinal import OMEGA, Ordinal, parse
from ordacc.realize import realize
from ordacc.simplex import (
    FiniteSupportMeasure,
    RelationSimplex,
    alpha0_via_embedding,
    embedding_max,
    example_3_28,
    harmonic_eval,
    mixture,
    point_mass,
    s_of_k_probe,
    u_eval_bauer,
)
from ordacc.space import Ord, omega_space
from ordacc.transfinite import alpha0_global, u_eval, u_norm

w = OMEGA
half = Fraction(1, 2)


def O(n):
    return Ord(Ordinal.of(n))


# ------------------------------------------------------------------ measures


def test_measure_validation():
    with pytest.raises(ValueError):
        FiniteSupportMeasure(((O(0), half),))
    with pytest.raises(ValueError):
        FiniteSupportMeasure(((O(0), half), (O(0), half)))
    with pytest.raises(ValueError):
        FiniteSupportMeasure(((O(0), Fraction(3, 2)), (O(1), Fraction(-1, 2))))
    mu = mixture([(half, point_mass(O(0))), (half, point_mass(O(1)))])
    assert mu.weight(O(1)) == half and mu.weight(O(7)) == 0


def test_harmonic_eval_examples():
    f = lambda x: Fraction(x.beta.to_int()) if x.beta.is_finite else Fraction(10)
    assert harmonic_eval(f, point_mass(O(3))) == 3
    assert harmonic_eval(f, mixture([(half, point_mass(O(2))), (half, point_mass(Ord(w)))])) == 6
    with pytest.raises(ValueError):
        harmonic_eval(f, point_mass(O(2)), domain=lambda x: False)


def test_bauer_examples():
    a = Fraction(4, 5)
    B = base_step(a)
    mu = mixture([(half, point_mass(Ord(w))), (half, point_mass(O(0)))])
    assert u_eval_bauer(B, 0, mu) == 0
    assert u_eval_bauer(B, 1, mu) == a / 2
    H, _ = realize(2, 1)
    m = marked(H)
    assert u_eval_bauer(H, 1, point_mass(m)) == u_eval(H, 1, m)


def test_bauer_rejects_relation_simplices():
    K = RelationSimplex({"a": base_step(1)})
    with pytest.raises(TypeError):
        u_eval_bauer(K, 1, point_mass(("a", O(0))))


@given(st.integers(1, 3), st.fractions(min_value=0, max_value=1), st.integers(0, 6))
def test_harmonicity(gamma, t, n):
    H, _ = realize(2, 1)
    pts = concrete_witnesses(H)
    x, y = pts[n % len(pts)], marked(H)
    if t in (0, 1) or x == y:
        return
    mu = mixture([(t, point_mass(x)), (1 - t, point_mass(y))])
    assert u_eval_bauer(H, gamma, mu) == t * u_eval(H, gamma, x) + (1 - t) * u_eval(H, gamma, y)


# ----------------------------------------------------------------- embedding


def _example():
    F = base_step(1)
    K = RelationSimplex({"c": F, "d": F}, outside=frozenset({"e"}))
    b = ("c", O(0))
    K.relations[b] = mixture([(half, point_mass(("c", Ord(w)))), (half, point_mass(("d", Ord(w))))])
    K.__post_init__()
    return K, b


def test_embedding_on_extreme_and_outside_points():
    K, _ = _example()
    assert embedding_max(K, 1, point_mass(("d", Ord(w)))) == 1
    assert embedding_max(K, 1, point_mass(("d", O(3)))) == 0
    assert embedding_max(K, 2, point_mass(("outside", "e"))) == 0


def test_embedding_uses_the_canonical_measure():
    K, b = _example()
    assert K.canonical(point_mass(b)) == mixture(
        [(half, point_mass(("c", Ord(w)))), (half, point_mass(("d", Ord(w))))]
    )
    # the closure point is isolated in L, so keeping the relation never helps
    assert K.u_on_L(1, b) == 0
    assert embedding_max(K, 1, point_mass(b)) == 1


def test_relations_must_use_extreme_sites():
    with pytest.raises(ValueError):
        RelationSimplex({"c": base_step(1)}, {("c", O(0)): point_mass(("c", O(0)))})
    with pytest.raises(ValueError):
        RelationSimplex({"c": base_step(1)}, {("z", O(0)): point_mass(("c", Ord(w)))})


def _shifted():
    return Shift(base_step(1), 1)


def _example_simplex():
    F1, _ = realize(2, 1)
    K = RelationSimplex({"a": F1, "c": _shifted(), "d": _shifted()})
    b = ("a", marked(F1))
    K.relations[b] = mixture([(half, point_mass(("c", Ord(w)))), (half, point_mass(("d", Ord(w))))])
    K.__post_init__()
    return K, b


@given(st.integers(0, 3))
def test_embedding_is_monotone_and_bounded(g):
    K, _ = _example_simplex()
    sites = [(n, x) for n, H in K.components.items() for x in concrete_witnesses(H)]
    top = max(u_norm(H, g + 1) for H in K.components.values())
    for s in sites:
        lo, hi = embedding_max(K, g, point_mass(s)), embedding_max(K, g + 1, point_mass(s))
        assert lo <= hi <= top


@given(st.integers(1, 3))
def test_embedding_dominates_the_restriction(g):
    K, _ = _example_simplex()
    for n, H in K.components.items():
        for x in concrete_witnesses(H):
            assert embedding_max(K, g, point_mass((n, x))) >= K.u_on_L(g, (n, x)) or (n, x) in K.relations


# ------------------------------------------------------------------- example


def test_example_report():
    r = example_3_28()
    assert r["alpha0_restricted"] == 2
    assert r["alpha0_full"] == 1
    assert r["u1_equals_u2_on_K"] is True
    assert r["alpha0_full"] <= r["alpha0_restricted"]
    table = {row["site"]: (row["u1"], row["u2"]) for row in r["u_restricted"]}
    assert table["a:pair(o:w,o:w)"] == ("1/2", "1")
    assert table["c:o:w"] == table["d:o:w"] == ("1", "1")
    full = {row["site"]: (row["u1"], row["u2"]) for row in r["u_full"]}
    assert full["a:pair(o:w,o:w)"] == ("1", "1")


def test_shifted_component_matches_displayed_sequence():
    # f_k = 0 at c_n when k < n and 1 elsewhere: same differences for k >= 1
    F2 = _shifted()
    for n in range(5):
        for k in range(1, 7):
            assert eval_tau(F2, k, O(n)) == (1 if k < n else 0)
    assert alpha0_global(F2) == 1


def test_alpha0_via_embedding_reports_unknown_when_not_stable():
    K, _ = _example()
    probes = [point_mass(("c", Ord(w)))]
    assert alpha0_via_embedding(K, probes) == 1
    v = alpha0_via_embedding(K, probes, max_stage=0)
    assert not isinstance(v, Ordinal)


# --------------------------------------------------------------------- probes


def test_probe_examples():
    got = s_of_k_probe(omega_space(2, 1), [0, 1, 2, 3])
    assert [ok for _, ok in got] == [True, True, True, False]
    got = s_of_k_probe(omega_space(1, 1), [0, 1, 2])
    assert [ok for _, ok in got] == [True, True, False]
    got = s_of_k_probe(omega_space(w, 1), [3, w, parse("w+1"), parse("w+2")])
    assert [ok for _, ok in got] == [True, True, True, False]
    with pytest.raises(ValueError):
        s_of_k_probe(space_of(Product(base_step(1), base_step(1))), [0])

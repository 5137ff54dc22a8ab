"""Candidate sequences with a prescribed order of accumulation.

Each constructor returns the term together with its closed-form profile, and
checks the properties the construction promises against that profile before
returning.  The oracle plays no part here; tests compare the two separately.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .candidate import (
    ClopenCopy,
    ExplicitRational,
    HypothesisViolation,
    PowerFamily,
    SequenceFamily,
    base_step,
    bound,
    embed_zero,
    fmt_rat,
    identity_chart,
    marked_delay,
    power_chart,
    product,
    rat,
    renorm_power,
    union,
    zero_term,
)
from .ordinal import ONE, ZERO, Ordinal, fmt, fundamental_seq, is_irreducible, omega_pow, ordinal
from .space import OmegaSpace, cb_rank, rho
from .transfinite import TransfiniteProfile, profile_closed_form

__all__ = [
    "select_weights",
    "cnf_blocks",
    "realize_irreducible",
    "realize",
    "realize_successor_plus",
    "realize_in_space",
]


def cnf_blocks(alpha: Ordinal) -> list:
    """``[(beta_j, m_j)]`` with ``alpha = w^beta_1 m_1 + ... + w^beta_N m_N``."""
    return list(ordinal(alpha).terms)


def select_weights(alpha, a) -> list:
    """Weights ``a_1 > ... > a_N`` summing to ``a`` with ``a_j / m_j >= a_{j+1} + ... + a_N``.

    Built backwards from ``a_N = 1`` by ``a_j = (m_j + 1) * (a_{j+1} + ... + a_N)``
    and then scaled.
    """
    alpha, a = ordinal(alpha), rat(a)
    if alpha.is_zero:
        raise ValueError("alpha must be positive")
    if a <= 0:
        raise ValueError("a must be positive")
    ms = [m for _, m in cnf_blocks(alpha)]
    raw = [Fraction(1)]
    for m in reversed(ms[:-1]):
        raw.insert(0, (m + 1) * sum(raw))
    total = sum(raw)
    return [a * w / total for w in raw]


def _weights_ok(ws: list, ms: list) -> bool:
    decreasing = all(x > y for x, y in zip(ws, ws[1:]))
    return decreasing and all(ws[j] / ms[j] >= sum(ws[j + 1:]) for j in range(len(ws) - 1))


def _check_positive(a, eps=None):
    a = rat(a)
    if a <= 0:
        raise ValueError("a must be positive")
    if eps is not None:
        eps = rat(eps)
        if not 0 < eps < a:
            raise HypothesisViolation("budget", f"need 0 < eps < a, got eps = {fmt_rat(eps)}, a = {fmt_rat(a)}")
    return a, eps


def _ratio_seq(p: int, q: int) -> ExplicitRational:
    """``n -> (p/q) * n/(n+1)``."""
    return ExplicitRational((0, p), (q, q), Fraction(p, q), "increasing")


def _over_n(x: Fraction) -> ExplicitRational:
    """``n -> x/n``."""
    return ExplicitRational((x.numerator,), (0, x.denominator), Fraction(0), "decreasing")


def _assert_irreducible_profile(H, P: TransfiniteProfile, alpha: Ordinal, a, eps, delta) -> None:
    want = ((alpha, a),)
    if P.jumps != want or P.alpha0 != alpha:
        raise AssertionError(f"profile {P.to_json()} does not jump once to {fmt_rat(a)} at {fmt(alpha)}")
    h_cap = a if alpha.is_finite else eps
    if bound(H) > h_cap:
        raise AssertionError(f"sup h = {fmt_rat(bound(H))} exceeds {fmt_rat(h_cap)}")
    if delta and P.norm(delta) > eps:
        raise AssertionError(f"||u_{fmt(delta)}|| = {fmt_rat(P.norm(delta))} exceeds {fmt_rat(eps)}")
    if P.bound != a:
        raise AssertionError(f"sup of the norms is {fmt_rat(P.bound)}, not {fmt_rat(a)}")


def realize_irreducible(alpha, a, eps, delta=ZERO):
    """The three-case recursion on ``alpha = w^beta``.

    ``beta = 0`` gives a base step.  For a successor ``beta`` the result is the
    union over ``n >= N`` of ``n/(n+1)`` times the renormalized ``n``-th powers
    of the term for ``w^(beta-1)``, where ``N`` is least with ``a/N <= eps``.
    For a limit ``beta`` it is the union over ``n >= N`` of the terms for
    ``w^beta[n]`` with height ``a n/(n+1)``, budget ``eps/n`` and
    ``delta_n = w^beta[n-1]``; ``N >= 2`` is least with ``w^beta[N-1] > delta``.
    """
    alpha, delta = ordinal(alpha), ordinal(delta)
    a, eps = _check_positive(a, eps)
    if not is_irreducible(alpha):
        raise ValueError(f"{fmt(alpha)} is not irreducible")
    if not (delta.is_zero or is_irreducible(delta)) or not delta < alpha:
        raise HypothesisViolation("irreducible delta", f"need delta < alpha irreducible, got {fmt(delta)}")
    H = _irreducible_term(alpha, a, eps, delta)
    P = profile_closed_form(H)
    _assert_irreducible_profile(H, P, alpha, a, eps, delta)
    return H, P


def _irreducible_term(alpha: Ordinal, a: Fraction, eps: Fraction, delta: Ordinal):
    beta = alpha.leading_exponent
    if beta.is_zero:
        return base_step(a)
    if beta.is_successor:
        prev = beta.predecessor()
        sub_delta = ZERO if prev.is_zero else ONE
        G = _irreducible_term(omega_pow(prev), a, eps, sub_delta)
        N = max(1, -(-a // eps))
        return union(PowerFamily(G, _ratio_seq(1, 1)), int(N))
    # limit exponent: a sequence of smaller irreducibles
    period = lambda n: omega_pow(fundamental_seq(beta, n))
    N = 2
    while not period(N - 1) > delta:
        N += 1
    top_of = lambda n: a * n / (n + 1)
    eps_of = lambda n: eps / n
    delta_of = lambda n: period(n - 1)

    def build(n):
        return _irreducible_term(period(n), top_of(n), eps_of(n), delta_of(n))

    meta = dict(limit=alpha, top=a, period=period, top_of=top_of, eps=eps_of, delta=delta_of)
    fam = SequenceFamily(
        key=f"irreducible({fmt(alpha)},{fmt_rat(a)},{fmt_rat(eps)})",
        builder=build,
        norm_bound=_over_n(eps),
        rank_limit=alpha,
        meta=meta,
    )
    return union(fam, N)


def _power_block(F, m: int):
    return F if m == 1 else renorm_power(F, m)


def _left_product(factors: list):
    """``((f_0 x f_1) x f_2) x ...``; the last factor is outermost."""
    out = factors[0]
    for f in factors[1:]:
        out = product(out, f)
    return out


def _factor(beta: Ordinal, weight: Fraction):
    """The irreducible term for ``w^beta`` with a standard budget."""
    alpha = omega_pow(beta)
    return _irreducible_term(alpha, weight, weight / 2, ZERO if beta.is_zero else ONE)


def realize(alpha, a):
    """A product of renormalized powers with order of accumulation ``alpha``.

    For ``alpha = w^beta_1 m_1 + ... + w^beta_N m_N`` the factors are the
    ``m_j``-th renormalized powers of the irreducible terms for ``w^beta_j``
    with weights from :func:`select_weights`, multiplied with the last block
    innermost.
    """
    alpha, a = ordinal(alpha), rat(a)
    if alpha.is_zero:
        raise ValueError("alpha must be positive")
    _check_positive(a)
    blocks = cnf_blocks(alpha)
    ws = select_weights(alpha, a)
    factors = [_power_block(_factor(b, w), m) for (b, m), w in zip(blocks, ws)]
    H = _left_product(factors[::-1])
    P = profile_closed_form(H)
    if P.alpha0 != alpha or P.at_marked(alpha) != a or P.bound != a:
        raise AssertionError(f"realization of {fmt(alpha)} has profile {P.to_json()}")
    return H, P


def _stage_one(beta: Ordinal, a: Fraction):
    """Delayed marked points on the irreducible union for ``w^beta``, ``beta > 0``.

    With ``b = 2a/3`` the marked value is ``b/2`` on ``[1, w^beta)``, ``b`` at
    ``w^beta`` and ``a`` from ``w^beta + 1`` on.
    """
    b = 2 * a / 3
    U = _irreducible_term(omega_pow(beta), b, b / 2, ONE)
    return marked_delay(U, b / 2, b)


def realize_successor_plus(alpha, a):
    """A term with order of accumulation ``alpha + 1`` on the space for ``alpha`` (infinite).

    If the last CNF block of ``alpha`` is infinite, the delayed union carries
    weight ``a_N/m_N`` and sits innermost, followed by the ``(m_N - 1)``-th power
    of the last factor at weight ``a_N (m_N - 1)/m_N``.  If the last block is
    finite, ``a_N`` is first lowered to at most ``a_(N-1)/(3 m_(N-1))``; the
    delay then replaces one copy of the second-to-last factor, and the finite
    block is innermost.
    """
    alpha, a = ordinal(alpha), rat(a)
    if alpha.is_finite:
        raise ValueError("the successor construction needs an infinite alpha")
    _check_positive(a)
    blocks = cnf_blocks(alpha)
    ms = [m for _, m in blocks]
    ws = select_weights(alpha, a)
    if not blocks[-1][0].is_zero:
        factors = [_power_block(_factor(b, w), m) for (b, m), w in zip(blocks[:-1], ws[:-1])]
        bN, mN = blocks[-1]
        wN = ws[-1]
        inner = [_stage_one(bN, wN / mN)]
        if mN > 1:
            inner.append(_power_block(_factor(bN, wN * (mN - 1) / mN), mN - 1))
        H = _left_product(inner + factors[::-1])
    else:
        ws[-1] = min(ws[-1], ws[-2] / (3 * ms[-2]))
        total = sum(ws)
        ws = [a * w / total for w in ws]
        if not _weights_ok(ws, ms):
            raise AssertionError(f"weights {ws} violate the product lemma")
        factors = [_power_block(_factor(b, w), m) for (b, m), w in zip(blocks[:-2], ws[:-2])]
        bM, mM = blocks[-2]
        wM = ws[-2]
        inner = [_power_block(_factor(ZERO, ws[-1]), ms[-1]), _stage_one(bM, wM / mM)]
        if mM > 1:
            inner.append(_power_block(_factor(bM, wM * (mM - 1) / mM), mM - 1))
        H = _left_product(inner + factors[::-1])
    P = profile_closed_form(H)
    target = alpha + 1
    if P.alpha0 != target or P.at_marked(target) != a or P.bound != a:
        raise AssertionError(f"successor realization of {fmt(alpha)} has profile {P.to_json()}")
    if P.at_marked(alpha) >= a:
        raise AssertionError("the marked value reaches a before alpha + 1")
    return H, P


def _chart_for(gamma: Ordinal) -> Optional[ClopenCopy]:
    hi = omega_pow(gamma)
    if gamma == ONE:
        return identity_chart(hi)
    if gamma.is_finite:
        return power_chart(gamma.to_int())
    # no explicit homeomorphism for infinite exponents; points of the image
    # are then addressed in the embedded term's own coordinates
    return ClopenCopy(hi, f"w^{fmt(gamma)}")


def realize_in_space(E, gamma, a):
    """A term on the ordinal space ``E`` with order of accumulation ``gamma``.

    The realization for ``gamma`` (or the successor construction when ``gamma``
    equals the infinite CB rank of ``E``) is placed on the clopen initial
    interval ``[0, w^gamma']`` and extended by zero.
    """
    gamma, a = ordinal(gamma), rat(a)
    _check_positive(a)
    if not isinstance(E, OmegaSpace):
        raise ValueError("realization in a space is implemented for ordinal spaces w^alpha*n+1")
    r = rho(E)
    if gamma > r:
        raise HypothesisViolation(
            "global bound", f"gamma = {fmt(gamma)} exceeds rho(E) = {fmt(r)}; no sequence on E accumulates that late"
        )
    if gamma.is_zero:
        Z = zero_term(E)
        return Z, profile_closed_form(Z)
    cb = cb_rank(E)
    if not cb.is_finite and gamma == cb:
        base = gamma.predecessor()
        inner, _ = realize_successor_plus(base, a)
        image = ClopenCopy(omega_pow(base), f"w^{fmt(base)}")
    else:
        inner, _ = realize(gamma, a)
        image = _chart_for(gamma)
    H = embed_zero(inner, E, image)
    P = profile_closed_form(H)
    if P.alpha0 != gamma:
        raise AssertionError(f"embedded realization has alpha0 {fmt(P.alpha0)}, expected {fmt(gamma)}")
    return H, P

"""Simplices presented by finitely supported measures.

A Bauer simplex is modelled by its compact set of extreme points: an element
is a finitely supported probability measure on it, and harmonic functions are
integrated against that measure.  A non-Bauer simplex is modelled by a closed
set ``L`` of sites, split into clopen components that each carry a candidate
term, together with finitely many *closure points*: sites of ``L`` that are not
extreme, each with its unique representing combination of extreme sites.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .candidate import (
    HypothesisViolation,
    OracleUnsupported,
    Shift,
    base_step,
    concrete_witnesses,
    fmt_rat,
    marked,
    rat,
    space_of,
)
from .ordinal import Ordinal, fmt, ordinal
from .realize import realize, realize_in_space
from .space import OmegaSpace, format_point, is_member, rho
from .transfinite import Budget, Unknown, alpha0_global, u_eval

__all__ = [
    "FiniteSupportMeasure",
    "point_mass",
    "mixture",
    "RelationSimplex",
    "harmonic_eval",
    "u_eval_bauer",
    "embedding_max",
    "alpha0_via_embedding",
    "example_3_28",
    "s_of_k_probe",
]


@dataclass(frozen=True)
class FiniteSupportMeasure:
    """A probability measure with finitely many atoms ``(site, weight)``."""

    atoms: tuple

    def __post_init__(self):
        merged: dict = {}
        for site, w in self.atoms:
            w = rat(w)
            if w <= 0:
                raise ValueError("atom weights must be positive")
            if site in merged:
                raise ValueError(f"repeated atom {site!r}")
            merged[site] = w
        if sum(merged.values()) != 1:
            raise ValueError(f"weights sum to {fmt_rat(sum(merged.values()))}, not 1")
        object.__setattr__(self, "atoms", tuple(merged.items()))

    @property
    def support(self) -> list:
        return [s for s, _ in self.atoms]

    def weight(self, site) -> Fraction:
        return dict(self.atoms).get(site, Fraction(0))


def point_mass(site) -> FiniteSupportMeasure:
    return FiniteSupportMeasure(((site, Fraction(1)),))


def mixture(parts: Iterable) -> FiniteSupportMeasure:
    """``sum t_i mu_i`` for pairs ``(t_i, mu_i)``, merging equal sites."""
    acc: dict = {}
    for t, mu in parts:
        t = rat(t)
        for site, w in mu.atoms:
            acc[site] = acc.get(site, Fraction(0)) + t * w
    return FiniteSupportMeasure(tuple((s, w) for s, w in acc.items() if w))


def harmonic_eval(f: Callable, mu: FiniteSupportMeasure, domain: Optional[Callable] = None):
    """``sum mu(x) f(x)``; :class:`Unknown` if any value is unknown.

    ``domain``, when given, must accept every atom.
    """
    total = Fraction(0)
    for site, w in mu.atoms:
        if domain is not None and not domain(site):
            raise ValueError(f"atom {site!r} lies outside the extreme points")
        v = f(site)
        if isinstance(v, Unknown):
            return v
        total += w * v
    return total


def u_eval_bauer(H, gamma, mu: FiniteSupportMeasure, budget: Optional[Budget] = None):
    """``u_gamma`` of the harmonic extension of ``H`` at the barycenter of ``mu``.

    On a Bauer simplex the transfinite sequence of the extension is the
    harmonic extension of the sequence on the extreme points.
    """
    if isinstance(H, RelationSimplex):
        raise TypeError("non-Bauer simplices are evaluated with embedding_max")
    gamma = ordinal(gamma)
    if gamma.is_zero:
        return Fraction(0)
    E = space_of(H)
    return harmonic_eval(lambda x: u_eval(H, gamma, x, budget), mu, lambda x: is_member(E, x))


# ------------------------------------------------------------ non-Bauer


@dataclass
class RelationSimplex:
    """A simplex known through a closed set ``L`` of sites and finitely many relations.

    ``components`` maps names to candidate terms; the sites of ``L`` are pairs
    ``(name, point)``.  ``relations`` maps each closure point (a site of ``L``
    that is not extreme) to its representing measure on extreme sites.
    ``outside`` names extreme points off ``L``, where the sequence vanishes
    uniformly; they are the sites ``("outside", label)``.
    """

    components: dict
    relations: dict = field(default_factory=dict)
    outside: frozenset = frozenset()

    def __post_init__(self):
        for c, mu in self.relations.items():
            if not self.in_L(c):
                raise ValueError(f"closure point {c!r} is not a site of L")
            for s in mu.support:
                if not self.is_extreme(s):
                    raise ValueError(f"relation for {c!r} uses the non-extreme site {s!r}")

    def in_L(self, site) -> bool:
        name, x = site
        return name in self.components and is_member(space_of(self.components[name]), x)

    def is_extreme(self, site) -> bool:
        if site[0] == "outside":
            return site[1] in self.outside
        return self.in_L(site) and site not in self.relations

    def is_site(self, site) -> bool:
        return self.is_extreme(site) or site in self.relations

    def canonical(self, mu: FiniteSupportMeasure) -> FiniteSupportMeasure:
        """The representing measure on extreme sites (unique in a simplex)."""
        for s in mu.support:
            if not self.is_site(s):
                raise ValueError(f"{s!r} is not a site of the simplex")
        return mixture(
            (w, self.relations[s]) if s in self.relations else (w, point_mass(s)) for s, w in mu.atoms
        )

    def u_on_L(self, gamma, site, budget: Optional[Budget] = None):
        """``u_gamma`` of the restriction to ``L`` at a site of ``L``; 0 off ``L``."""
        if site[0] == "outside":
            return Fraction(0)
        name, x = site
        return u_eval(self.components[name], gamma, x, budget)


def embedding_max(K: RelationSimplex, gamma, x: FiniteSupportMeasure, budget: Optional[Budget] = None):
    """``u_gamma`` at the barycenter of ``x`` as a maximum over its fiber.

    The fiber consists of the measures on ``L`` obtained from the canonical
    representing measure by moving mass from the support of a relation onto
    its closure point.  Moving mass is linear, so each relation is either not
    used or used to the full available amount; when the supports of the
    profitable relations are disjoint those choices are independent and the
    maximum is exact.  Overlapping profitable supports are not handled.
    """
    gamma = ordinal(gamma)
    base = K.canonical(x)
    u = {}
    for s in base.support:
        u[s] = K.u_on_L(gamma, s, budget)
        if isinstance(u[s], Unknown):
            return u[s]
    total = sum(w * u[s] for s, w in base.atoms)
    used: set = set()
    for c, rel in K.relations.items():
        t = min(base.weight(s) / w for s, w in rel.atoms)
        if t == 0:
            continue
        uc = K.u_on_L(gamma, c, budget)
        if isinstance(uc, Unknown):
            return uc
        split = Fraction(0)
        for s, w in rel.atoms:
            if s not in u:
                u[s] = K.u_on_L(gamma, s, budget)
            split += w * u[s]
        gain = uc - split
        if gain <= 0:
            continue
        if used & set(rel.support):
            raise OracleUnsupported("profitable relations with overlapping supports")
        used |= set(rel.support)
        total += t * gain
    return total


def alpha0_via_embedding(K: RelationSimplex, probes: list, max_stage: int = 8, budget=None):
    """Least finite ``l`` with ``u_l = u_(l+1)`` at every probe element, or :class:`Unknown`."""
    prev = [embedding_max(K, 0, mu, budget) for mu in probes]
    for ell in range(max_stage):
        cur = [embedding_max(K, ell + 1, mu, budget) for mu in probes]
        if any(isinstance(v, Unknown) for v in cur):
            return next(v for v in cur if isinstance(v, Unknown))
        if cur == prev:
            return Ordinal.of(ell)
        prev = cur
    return Unknown(f"no stabilization within {max_stage} stages")


# ------------------------------------------------------------ example


def _site_str(site) -> str:
    return f"{site[0]}:{format_point(site[1]) if site[0] != 'outside' else site[1]}"


def example_3_28(budget: Optional[Budget] = None) -> dict:
    """A simplex where the full sequence stabilizes before its restriction to ``L``.

    ``L`` has two clopen parts.  The first carries the order-2 realization on
    ``(w+1)^2`` (a copy of ``w^2 + 1``) whose marked point ``b`` is not extreme:
    ``b = (b1 + b2)/2``.  The second part is two convergent sequences
    ``c_n -> b1`` and ``d_n -> b2`` where ``f_k = 0`` at ``c_n, d_n`` for
    ``k < n`` and ``f_k = 1`` elsewhere.  Its successive differences agree with
    those of a base step shifted by one, so it is represented that way.
    """
    F1, _ = realize(2, 1)
    F2 = Shift(base_step(1), 1)
    K = RelationSimplex({"a": F1, "c": F2, "d": F2})
    b = ("a", marked(F1))
    b1, b2 = ("c", marked(F2)), ("d", marked(F2))
    K.relations[b] = mixture([(Fraction(1, 2), point_mass(b1)), (Fraction(1, 2), point_mass(b2))])
    K.__post_init__()

    l_sites = [(name, x) for name, H in K.components.items() for x in concrete_witnesses(H)]
    probes = [point_mass(s) for s in l_sites]
    probes += [mixture([(Fraction(1, 2), point_mass(b)), (Fraction(1, 2), point_mass(("c", concrete_witnesses(F2)[0])))])]
    probes += [mixture([(Fraction(1, 3), point_mass(b1)), (Fraction(2, 3), point_mass(("a", concrete_witnesses(F1)[0])))])]

    restricted = max(alpha0_global(H, budget, method="oracle") for H in (F1, F2))
    full = alpha0_via_embedding(K, probes, budget=budget)

    def table(fn):
        return [
            {"site": _site_str(s), "u1": fmt_rat(fn(1, s)), "u2": fmt_rat(fn(2, s))} for s in [b, b1, b2]
        ]

    u_L = table(lambda g, s: K.u_on_L(g, s, budget))
    u_K = table(lambda g, s: embedding_max(K, g, point_mass(s), budget))
    same = all(embedding_max(K, 1, mu, budget) == embedding_max(K, 2, mu, budget) for mu in probes)
    return {
        "alpha0_restricted": restricted,
        "alpha0_full": full,
        "u1_equals_u2_on_K": same,
        "u_restricted": u_L,
        "u_full": u_K,
        "probes": len(probes),
    }


def s_of_k_probe(E, gammas: list, a=1) -> list:
    """Which ``gamma`` are realized as orders of accumulation on the Bauer simplex over ``E``.

    Every attempt with ``gamma <= rho(E)`` must succeed and every other must
    fail; anything else raises ``AssertionError``.
    """
    if not isinstance(E, OmegaSpace):
        raise ValueError("probes are implemented for ordinal spaces w^alpha*n+1")
    r = rho(E)
    out = []
    for g in gammas:
        g = ordinal(g)
        try:
            _, P = realize_in_space(E, g, a)
            ok = P.alpha0 == g
        except HypothesisViolation:
            ok = False
        if ok != (g <= r):
            raise AssertionError(f"gamma = {fmt(g)}: realized = {ok} but rho = {fmt(r)}")
        out.append((g, ok))
    return out

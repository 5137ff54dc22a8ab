"""Candidate sequences built from combinators, evaluated with exact rationals.

A candidate term denotes a non-decreasing sequence ``(h_k)`` of non-negative
functions on a space term, with ``h_0 == 0`` and pointwise limit ``h``.  Values
are computed by structural recursion; ``k`` may be a concrete integer, a
symbolic :class:`~ordacc.space.Sym` ("some large k"), or ``INF_INDEX`` (the limit).

Symbolic points (containing ``Sym`` indices) stand for every concrete point of
the same pattern.  :func:`reps` and :func:`approach` list such patterns; they
are what turns a limsup over an infinite neighbourhood into a finite maximum.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
import typing
from typing import Callable, Optional

from .ordinal import OMEGA, ZERO, Ordinal, add, block_split, nat_mul, omega_pow, ordinal
from .ordinal import fmt as fmt_ordinal
from .ordinal import parse as parse_ordinal
from .space import (
    INF_INDEX,
    AtInfinity,
    ClopenRestrict,
    IndexSet,
    InFamily,
    InitialInterval,
    MarkedProduct,
    OmegaSpace,
    OnePointUnion,
    Ord,
    Pair,
    Point,
    RankProfile,
    SpaceFamily,
    SpaceTerm,
    Sym,
    canonical_class,
    cb_rank,
    clopen_restrict,
    format_point,
    format_space,
    index_gt,
    is_member,
    marked_point,
    one_point_union,
    parse_space,
    rank,
    sup_of_sequence,
)

__all__ = [
    "HypothesisViolation",
    "OracleUnsupported",
    "ChartUnavailable",
    "rat",
    "fmt_rat",
    "KValue",
    "EventuallyConstant",
    "ExplicitRational",
    "ScaledFamily",
    "ListFamily",
    "PowerFamily",
    "SequenceFamily",
    "BaseStep",
    "Scale",
    "Shift",
    "Product",
    "RenormPower",
    "Union",
    "Restrict",
    "EmbedZero",
    "MarkedDelay",
    "ZeroTerm",
    "ClopenCopy",
    "Img",
    "Off",
    "base_step",
    "scale",
    "shift",
    "product",
    "renorm_power",
    "union",
    "restrict",
    "embed_zero",
    "marked_delay",
    "zero_term",
    "power_chart",
    "identity_chart",
    "space_of",
    "bound",
    "marked",
    "is_usc_d",
    "eval_h",
    "eval_limit",
    "eval_tau",
    "kvalue_h",
    "reps",
    "approach",
    "point_level",
    "instantiate",
    "concrete_witnesses",
    "PointFunction",
    "h_function",
    "tau_function",
    "diff_function",
    "constant_function",
    "indicator_function",
    "usc_envelope_at",
    "DominanceResult",
    "uniform_dominates",
    "has_property_P",
    "term_to_json",
    "format_term",
    "parse_term",
    "parse_rational_fn",
    "constant_seq",
    "ConvergentSeq",
]


class HypothesisViolation(ValueError):
    """A side condition of a construction or lemma fails; names the failed inequality."""

    def __init__(self, hypothesis: str, detail: str):
        super().__init__(f"{hypothesis}: {detail}")
        self.hypothesis = hypothesis
        self.detail = detail


class OracleUnsupported(ValueError):
    """The pointwise oracle has no symbolic representative for this term."""


class ChartUnavailable(ValueError):
    """An embedded term was evaluated inside its image but no chart is known."""


# ---------------------------------------------------------------- rationals


def rat(x) -> Fraction:
    """Coerce an int, Fraction, or ``"p/q"`` string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot use {type(x).__name__} as a rational")


def fmt_rat(q: Fraction) -> str:
    q = rat(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ------------------------------------------------------------------ KValue


@dataclass(frozen=True)
class KValue:
    """Values indexed by ``k``: ``prefix`` lists ``(k, value)`` for ``k = 0..m-1``, then ``tail``."""

    prefix: tuple
    tail: Fraction

    def __post_init__(self):
        for i, (k, _) in enumerate(self.prefix):
            if k != i:
                raise ValueError("KValue prefix must list k = 0, 1, 2, ... in order")

    def at(self, k: int) -> Fraction:
        return self.prefix[k][1] if k < len(self.prefix) else self.tail


# --------------------------------------------------------- polynomials in n


def _poly_eval(p: tuple, n: int) -> int:
    return sum(c * n**i for i, c in enumerate(p))


def _poly_trim(p) -> tuple:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _poly_mul(p: tuple, q: tuple) -> tuple:
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _poly_trim(out)


def _poly_sub(p: tuple, q: tuple) -> tuple:
    m = max(len(p), len(q))
    return _poly_trim((p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(m))


def _poly_shift1(p: tuple) -> tuple:
    """Coefficients of ``p(n + 1)``."""
    out = [0] * len(p)
    for i, c in enumerate(p):
        for j in range(i + 1):
            out[j] += c * math.comb(i, j)
    return _poly_trim(out)


def _root_bound(p: tuple) -> int:
    """Every real root of ``p`` lies below this integer (Cauchy's bound)."""
    lead = abs(p[-1])
    return 1 + math.ceil(max((Fraction(abs(c), lead) for c in p[:-1]), default=Fraction(0)))


def _nonneg_from(p: tuple, start: int) -> bool:
    """Exact check that ``p(n) >= 0`` for every integer ``n >= start``."""
    if not p:
        return True
    if p[-1] < 0:
        return False
    return all(_poly_eval(p, n) >= 0 for n in range(start, max(start, _root_bound(p)) + 1))


# ------------------------------------------------------- convergent sequences


@dataclass(frozen=True)
class EventuallyConstant:
    """``prefix[i]`` at index ``start + i``, then ``tail`` forever."""

    prefix: tuple
    tail: Fraction
    start: int = 0

    @property
    def limit(self) -> Fraction:
        return self.tail

    def value(self, n: int) -> Fraction:
        i = n - self.start
        if i < 0:
            raise ValueError(f"index {n} precedes the sequence start {self.start}")
        return self.prefix[i] if i < len(self.prefix) else self.tail

    def validate_from(self, start: int) -> None:
        if start < self.start:
            raise ValueError("sequence used before its start index")
        if any(v < 0 for v in self.prefix) or self.tail < 0:
            raise ValueError("sequence values must be non-negative")

    def sup_from(self, n: int) -> Fraction:
        i = max(n - self.start, 0)
        return max(list(self.prefix[i:]) + [self.tail])

    def argmax_from(self, n: int) -> int:
        best = self.sup_from(n)
        m = n
        while self.value(m) != best:
            m += 1
        return m

    def scaled(self, q: Fraction) -> "EventuallyConstant":
        return EventuallyConstant(tuple(v * q for v in self.prefix), self.tail * q, self.start)

    def to_json(self) -> dict:
        return {
            "kind": "EventuallyConstant",
            "prefix": [fmt_rat(v) for v in self.prefix],
            "start": self.start,
            "tail": fmt_rat(self.tail),
        }

    def __str__(self) -> str:
        if not self.prefix:
            return fmt_rat(self.tail)
        return f"[{','.join(fmt_rat(v) for v in self.prefix)}|{fmt_rat(self.tail)}]"


@dataclass(frozen=True)
class ExplicitRational:
    """``P(n)/Q(n)`` with integer coefficient tuples (constant term first).

    ``limit`` is the declared limit and is checked against the degrees of ``P``
    and ``Q``; ``monotone`` is ``"increasing"``, ``"decreasing"`` or ``None``.
    """

    num: tuple
    den: tuple
    limit: Fraction
    monotone: Optional[str] = None

    def __post_init__(self):
        num, den = _poly_trim(self.num), _poly_trim(self.den)
        if not den:
            raise ValueError("zero denominator")
        if not all(isinstance(c, int) for c in num + den):
            raise ValueError("coefficients must be integers")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "limit", rat(self.limit))
        if len(num) > len(den):
            raise ValueError("formula diverges: numerator degree exceeds denominator degree")
        true = Fraction(num[-1], den[-1]) if num and len(num) == len(den) else Fraction(0)
        if true != self.limit:
            raise ValueError(f"declared limit {fmt_rat(self.limit)} but the formula tends to {fmt_rat(true)}")
        if self.monotone not in (None, "increasing", "decreasing"):
            raise ValueError(f"unknown monotone flag {self.monotone!r}")

    def value(self, n: int) -> Fraction:
        return Fraction(_poly_eval(self.num, n), _poly_eval(self.den, n))

    def _step(self) -> tuple:
        # sign of value(n+1) - value(n), up to the positive factor Q(n)Q(n+1)
        return _poly_sub(
            _poly_mul(_poly_shift1(self.num), self.den),
            _poly_mul(self.num, _poly_shift1(self.den)),
        )

    def validate_from(self, start: int) -> None:
        den = self.den if self.den[-1] > 0 else tuple(-c for c in self.den)
        if not _nonneg_from(den, start) or any(_poly_eval(self.den, n) == 0 for n in range(start, start + 1)):
            raise ValueError("denominator must stay positive on the index range")
        if self.den[-1] < 0:
            raise ValueError("write the formula with a positive leading denominator coefficient")
        if not _nonneg_from(self.num, start):
            raise ValueError("sequence values must be non-negative")
        step = self._step()
        if self.monotone == "increasing" and not _nonneg_from(step, start):
            raise ValueError("declared increasing but the formula decreases somewhere")
        if self.monotone == "decreasing" and not _nonneg_from(tuple(-c for c in step), start):
            raise ValueError("declared decreasing but the formula increases somewhere")

    def sup_from(self, n: int) -> Fraction:
        step = self._step()
        if not step:
            return self.value(n)
        edge = max(n, _root_bound(step))
        head = max(self.value(m) for m in range(n, edge + 1))
        # beyond the root bound the sequence is monotone
        tail = self.limit if step[-1] > 0 else self.value(edge)
        return max(head, tail)

    def argmax_from(self, n: int) -> Optional[int]:
        """An index attaining the supremum, or ``None`` when it is only approached."""
        best = self.sup_from(n)
        step = self._step()
        edge = max(n, _root_bound(step)) if step else n
        for m in range(n, edge + 1):
            if self.value(m) == best:
                return m
        return None

    def scaled(self, q: Fraction) -> "ExplicitRational":
        q = rat(q)
        if q < 0:
            raise ValueError("negative scale")
        if q == 0:
            return ExplicitRational((), (1,), Fraction(0), "decreasing")
        return ExplicitRational(
            tuple(c * q.numerator for c in self.num),
            tuple(c * q.denominator for c in self.den),
            self.limit * q,
            self.monotone,
        )

    def div_n(self) -> "ExplicitRational":
        return ExplicitRational(
            self.num, (0,) + self.den, Fraction(0), "decreasing" if self.monotone == "decreasing" else None
        )

    def to_json(self) -> dict:
        return {
            "kind": "ExplicitRational",
            "den": list(self.den),
            "limit": fmt_rat(self.limit),
            "monotone": self.monotone,
            "num": list(self.num),
        }

    def __str__(self) -> str:
        num, den = _fmt_poly(self.num), _fmt_poly(self.den)
        wrap = lambda s: s if s.lstrip("-").replace("*", "").replace("^", "").isalnum() else f"({s})"
        return num if den == "1" else f"{wrap(num)}/{wrap(den)}"


def _fmt_poly(p: tuple) -> str:
    if not p:
        return "0"
    parts = []
    for i, c in reversed(list(enumerate(p))):
        if c == 0:
            continue
        mono = "" if i == 0 else ("n" if i == 1 else f"n^{i}")
        coef = str(abs(c)) if (abs(c) != 1 or i == 0) else ""
        body = coef + ("*" if coef and mono else "") + mono
        parts.append(("-" if c < 0 else "+") + body)
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


ConvergentSeq = typing.Union[EventuallyConstant, ExplicitRational]


def constant_seq(q) -> ExplicitRational:
    q = rat(q)
    return ExplicitRational((q.numerator,), (q.denominator,), q, "decreasing")


def _as_rational_seq(seq: ConvergentSeq) -> ExplicitRational:
    if isinstance(seq, ExplicitRational):
        return seq
    if not seq.prefix:
        return constant_seq(seq.tail)
    raise ValueError("power families need a closed-form scale; use ExplicitRational")


# ---------------------------------------------------------------- families


@dataclass(frozen=True)
class ScaledFamily:
    """Member ``n`` is ``scale(n) * base``: one fixed shape with varying height."""

    base: "Term"
    scale: ConvergentSeq

    def member(self, n: int) -> "Term":
        return Scale(self.base, self.scale.value(n))

    def member_sym(self) -> "Term":
        # a symbolic index stands for n -> infinity
        return Scale(self.base, self.scale.limit)

    def concrete_indices(self, start: int) -> list:
        picks = {start}
        best = self.scale.argmax_from(start)
        if best is not None:
            picks.add(best)
        return sorted(picks)

    def norm_profile(self) -> ConvergentSeq:
        return self.scale.scaled(bound(self.base))

    def space_family(self, start: int) -> SpaceFamily:
        E = space_of(self.base)
        c = cb_rank(E)
        return SpaceFamily(
            f"copies:{format_space(E)}", lambda n: E, RankProfile("eventually-constant", c, lambda n: c, start)
        )


@dataclass(frozen=True)
class ListFamily:
    """Members ``prefix[0], prefix[1], ...`` from index ``first``, then ``tail`` forever."""

    prefix: tuple
    tail: "Term"
    first: int

    def member(self, n: int) -> "Term":
        i = n - self.first
        if i < 0:
            raise ValueError(f"member {n} precedes the stream start {self.first}")
        return self.prefix[i] if i < len(self.prefix) else self.tail

    def member_sym(self) -> "Term":
        return self.tail

    def concrete_indices(self, start: int) -> list:
        return list(range(start, self.first + len(self.prefix) + 1))

    def norm_profile(self) -> ConvergentSeq:
        return EventuallyConstant(tuple(bound(t) for t in self.prefix), bound(self.tail), self.first)

    def space_family(self, start: int) -> SpaceFamily:
        spaces = [space_of(t) for t in self.prefix]
        tail = space_of(self.tail)
        first = self.first
        key = "list:" + ";".join(format_space(E) for E in spaces) + "|" + format_space(tail)

        def member(n):
            i = n - first
            return spaces[i] if i < len(spaces) else tail

        profile = RankProfile(
            "eventually-constant", cb_rank(tail), lambda n: cb_rank(member(n)), first + len(spaces)
        )
        return SpaceFamily(key, member, profile)


@dataclass(frozen=True)
class PowerFamily:
    """Member ``n`` is ``scale(n)`` times the renormalized ``n``-th power of ``base``."""

    base: "Term"
    scale: ExplicitRational

    def member(self, n: int) -> "Term":
        return Scale(RenormPower(self.base, n), self.scale.value(n))

    def member_sym(self) -> "Term":
        raise OracleUnsupported("powers with a symbolic exponent have no finite representative set")

    def concrete_indices(self, start: int) -> list:
        return [start]

    def norm_profile(self) -> ConvergentSeq:
        return self.scale.scaled(bound(self.base)).div_n()

    def space_family(self, start: int) -> SpaceFamily:
        G = space_of(self.base)
        top = cb_rank(G).predecessor()

        def cb_of(n):
            # natural sum of n copies of the top rank, plus one
            return Ordinal((e, c * n) for e, c in top.terms) + 1

        def member(n):
            return space_of(RenormPower(self.base, n))

        if top.is_zero:
            profile = RankProfile("eventually-constant", cb_of(1), cb_of, start)
        else:
            profile = RankProfile("increasing", sup_of_sequence(cb_of, start + 8), cb_of)
        return SpaceFamily(f"powers:{format_space(G)}", member, profile)


@dataclass(frozen=True)
class SequenceFamily:
    """A stream given by a builder, with an upper bound on member norms.

    ``meta`` carries closed-form data the profile engine needs (periods, tops,
    and epsilon budgets of the members); it does not take part in equality.
    """

    key: str
    builder: Callable[[int], "Term"] = field(compare=False, repr=False)
    norm_bound: ConvergentSeq = field(compare=False)
    rank_limit: Ordinal = field(compare=False)
    meta: dict = field(compare=False, default_factory=dict, repr=False)

    def member(self, n: int) -> "Term":
        return _seq_member(self, n)

    def member_sym(self) -> "Term":
        raise OracleUnsupported("a stream of growing shapes has no finite representative set")

    def concrete_indices(self, start: int) -> list:
        return [start]

    def norm_profile(self) -> ConvergentSeq:
        return self.norm_bound

    def space_family(self, start: int) -> SpaceFamily:
        member = lambda n: space_of(self.member(n))
        profile = RankProfile("increasing", self.rank_limit, lambda n: cb_rank(member(n)))
        return SpaceFamily(f"seq:{self.key}", member, profile)


@lru_cache(maxsize=1024)
def _seq_member(family: SequenceFamily, n: int) -> "Term":
    return family.builder(n)


Family = typing.Union[ScaledFamily, ListFamily, PowerFamily, SequenceFamily]


# ------------------------------------------------------------------- terms


@dataclass(frozen=True)
class BaseStep:
    """On ``w+1``: ``h_k(n) = a`` when ``k > n`` and 0 otherwise; ``h_k(w) = 0``."""

    a: Fraction


@dataclass(frozen=True)
class Scale:
    inner: "Term"
    c: Fraction


@dataclass(frozen=True)
class Shift:
    """``h'_k = h_{k+s}`` for ``k >= 1``; a uniformly equivalent reindexing."""

    inner: "Term"
    s: int


@dataclass(frozen=True)
class Product:
    F: "Term"
    G: "Term"


@dataclass(frozen=True)
class RenormPower:
    F: "Term"
    p: int


@dataclass(frozen=True)
class Union:
    family: Family
    start: int


@dataclass(frozen=True)
class Restrict:
    inner: "Term"
    selector: object  # InitialInterval | IndexSet


@dataclass(frozen=True)
class ClopenCopy:
    """The clopen interval ``[0, hi]`` of an ordinal host, with a chart onto the inner space."""

    hi: Ordinal
    chart_name: str
    chart: Optional[Callable[[Ordinal], Point]] = field(compare=False, default=None, repr=False)

    def contains(self, x: Point) -> bool:
        return isinstance(x, Ord) and isinstance(x.beta, Ordinal) and x.beta <= self.hi


@dataclass(frozen=True)
class EmbedZero:
    inner: "Term"
    host: SpaceTerm
    image: ClopenCopy


@dataclass(frozen=True)
class MarkedDelay:
    """``h_k`` at the marked point of member ``n`` becomes ``c`` once ``k > n``."""

    union: Union
    c: Fraction
    cap: Fraction


@dataclass(frozen=True)
class ZeroTerm:
    space: SpaceTerm


Term = object  # any of the node classes above


@dataclass(frozen=True)
class Img:
    """A point of an embedded term's image, in the inner term's coordinates."""

    inner: Point


@dataclass(frozen=True)
class Off:
    """A host point outside an embedded term's image."""

    point: Point


_NODES = (BaseStep, Scale, Shift, Product, RenormPower, Union, Restrict, EmbedZero, MarkedDelay, ZeroTerm)


def _check_term(H) -> None:
    if not isinstance(H, _NODES):
        raise TypeError(f"not a candidate term: {H!r}")


# ------------------------------------------------------------ constructors


def base_step(a) -> BaseStep:
    a = rat(a)
    if a <= 0:
        raise ValueError("BaseStep needs a positive height")
    return BaseStep(a)


def scale(H, c) -> Scale:
    _check_term(H)
    c = rat(c)
    if c < 0:
        raise ValueError("scale factors must be non-negative")
    return Scale(H, c)


def shift(H, s: int) -> Shift:
    _check_term(H)
    if not isinstance(s, int) or s < 0:
        raise ValueError("shift must be a natural number")
    return Shift(H, s)


def product(F, G) -> Product:
    _check_term(F)
    _check_term(G)
    at_marked = _h(G, INF_INDEX, marked(G))
    if at_marked != 0:
        raise HypothesisViolation(
            "product", f"the limit of the right factor is {fmt_rat(at_marked)} at its marked point, not 0"
        )
    return Product(F, G)


def renorm_power(F, p: int):
    _check_term(F)
    if not isinstance(p, int) or p < 1:
        raise ValueError("power must be a positive integer")
    if _h(F, INF_INDEX, marked(F)) != 0:
        raise HypothesisViolation("power", "the base must vanish in the limit at its marked point")
    return RenormPower(F, p)


def union(family: Family, start: int = 0, norm_profile: Optional[ConvergentSeq] = None,
          require_vanishing: bool = True) -> Union:
    """Disjoint union sequence over ``family`` from index ``start``.

    The member norms must tend to 0 (the disjoint-union lemma's hypothesis)
    unless ``require_vanishing`` is off.  A supplied ``norm_profile`` is
    spot-checked against the members.
    """
    if not isinstance(start, int) or start < 0:
        raise ValueError("start index must be a natural number")
    if isinstance(family, ListFamily) and family.first != start:
        raise ValueError("a list family must start where the union starts")
    declared = family.norm_profile()
    declared.validate_from(start)
    if isinstance(family, PowerFamily):
        family.scale.validate_from(start)
        if start < 1:
            raise ValueError("power families start at exponent 1 or later")
    if norm_profile is not None:
        for n in range(start, start + 3):
            want, got = norm_profile.value(n), declared.value(n)
            exact = not isinstance(family, SequenceFamily)
            if (exact and want != got) or (not exact and got > want):
                raise HypothesisViolation(
                    "norm profile", f"member {n} has norm {fmt_rat(got)}, profile says {fmt_rat(want)}"
                )
        if norm_profile.limit != declared.limit:
            raise HypothesisViolation("norm profile", "declared limit disagrees with the members")
    if require_vanishing and declared.limit != 0:
        raise HypothesisViolation(
            "disjoint-union lemma", f"member norms tend to {fmt_rat(declared.limit)}, not 0"
        )
    U = Union(family, start)
    space_of(U)  # spot-checks the rank profile
    return U


def restrict(H, selector) -> Restrict:
    _check_term(H)
    clopen_restrict(space_of(H), selector)
    return Restrict(H, selector)


def embed_zero(H, host: SpaceTerm, image: ClopenCopy) -> EmbedZero:
    _check_term(H)
    if not isinstance(host, OmegaSpace):
        raise ValueError("embedding hosts are ordinal spaces")
    piece = clopen_restrict(host, InitialInterval(image.hi))
    if canonical_class(piece) != canonical_class(space_of(H)):
        raise ValueError(
            f"image [0, {image.hi}] is not homeomorphic to the space of the embedded term"
        )
    return EmbedZero(H, host, image)


def marked_delay(U: Union, c, cap) -> MarkedDelay:
    if not isinstance(U, Union):
        raise TypeError("marked_delay modifies a union term")
    c, cap = rat(c), rat(cap)
    if c <= 0:
        raise ValueError("delay value must be positive")
    if c > cap:
        raise HypothesisViolation("marked delay", f"c = {fmt_rat(c)} exceeds the declared bound {fmt_rat(cap)}")
    return MarkedDelay(U, c, cap)


def zero_term(E: SpaceTerm) -> ZeroTerm:
    return ZeroTerm(E)


# ------------------------------------------------------------------ charts


def identity_chart(hi: Ordinal) -> ClopenCopy:
    return ClopenCopy(hi, "identity", lambda xi: Ord(xi))


def _split_block(xi: Ordinal, q: int) -> tuple[int, Ordinal]:
    """Locate ``xi < w^(q+1)`` in the blocks ``[0, w^q]`` and ``]w^q t, w^q (t+1)]``.

    Returns the block number and the position inside the block as a point of ``[0, w^q]``.
    """
    wq = omega_pow(Ordinal.of(q))
    if xi <= wq:
        return 0, xi
    c, r = block_split(xi, Ordinal.of(q))
    if r.is_zero:
        return c - 1, wq
    return c, (Ordinal.of(r.to_int() - 1) if r.is_finite else r)


def _chart_pair(q: int, xi: Ordinal) -> tuple[Ordinal, Ordinal]:
    """A homeomorphism ``[0, w^(q+1)] -> [0, w^q] x [0, w]`` for ``q >= 1``.

    The blocks of the left side are matched with clopen pieces of the product:
    row ``j`` is ``]c_j, w^q] x {j}`` and column ``i`` is ``C_i x [i, w]``,
    where ``C_i`` is the ``i``-th block of ``[0, w^q)`` one level down.
    """
    wq = omega_pow(Ordinal.of(q))
    if xi == omega_pow(Ordinal.of(q + 1)):
        return wq, OMEGA
    t, eta = _split_block(xi, q)
    i, is_row = divmod(t, 2)
    low = omega_pow(Ordinal.of(q - 1))
    if is_row:
        cut = Ordinal.of(i) if q == 1 else nat_mul(low, i + 1)
        return add(cut + 1, eta), Ordinal.of(i)
    if q == 1:
        y = OMEGA if eta == OMEGA else Ordinal.of(i + eta.to_int())
        return Ordinal.of(i), y
    mu, y = _chart_pair(q - 1, eta)
    x = mu if i == 0 else add(nat_mul(low, i) + 1, mu)
    return x, (OMEGA if y == OMEGA else Ordinal.of(i + y.to_int()))


def _power_point(p: int, xi: Ordinal) -> Point:
    if p == 1:
        return Ord(xi)
    left, right = _chart_pair(p - 1, xi)
    return Pair(_power_point(p - 1, left), Ord(right))


def power_chart(p: int) -> ClopenCopy:
    """Chart of ``[0, w^p]`` onto ``(w+1)^p`` with left-nested pairs."""
    if p < 1:
        raise ValueError("power must be positive")
    hi = omega_pow(Ordinal.of(p))
    if p == 1:
        return identity_chart(hi)
    return ClopenCopy(hi, f"power{p}", lambda xi: _power_point(p, xi))


# ------------------------------------------------------ structural queries


@lru_cache(maxsize=None)
def _power_product(F, p: int):
    """The plain ``p``-fold product, nested to the left."""
    return F if p == 1 else Product(_power_product(F, p - 1), F)


@lru_cache(maxsize=None)
def space_of(H) -> SpaceTerm:
    if isinstance(H, BaseStep):
        return OmegaSpace(ZERO + 1, 1)
    if isinstance(H, (Scale, Shift)):
        return space_of(H.inner)
    if isinstance(H, Product):
        return MarkedProduct(space_of(H.F), space_of(H.G))
    if isinstance(H, RenormPower):
        return space_of(_power_product(H.F, H.p))
    if isinstance(H, Union):
        return one_point_union(H.family.space_family(H.start), H.start)
    if isinstance(H, MarkedDelay):
        return space_of(H.union)
    if isinstance(H, Restrict):
        return clopen_restrict(space_of(H.inner), H.selector)
    if isinstance(H, EmbedZero):
        return H.host
    if isinstance(H, ZeroTerm):
        return H.space
    raise TypeError(H)


@lru_cache(maxsize=None)
def bound(H) -> Fraction:
    """``sup h``; exact except for streams that only declare an upper bound."""
    if isinstance(H, BaseStep):
        return H.a
    if isinstance(H, Scale):
        return H.c * bound(H.inner)
    if isinstance(H, Shift):
        return bound(H.inner)
    if isinstance(H, Product):
        return max(bound(H.F), bound(H.G))
    if isinstance(H, RenormPower):
        return bound(H.F) / H.p
    if isinstance(H, Union):
        return H.family.norm_profile().sup_from(H.start)
    if isinstance(H, MarkedDelay):
        return max(bound(H.union), H.c)
    if isinstance(H, Restrict):
        if isinstance(H.selector, IndexSet):
            fam = _union_of(H.inner).family
            return max(bound(fam.member(i)) for i in H.selector.indices)
        return bound(H.inner)
    if isinstance(H, EmbedZero):
        return bound(H.inner)
    if isinstance(H, ZeroTerm):
        return Fraction(0)
    raise TypeError(H)


def _union_of(H) -> Union:
    return H.union if isinstance(H, MarkedDelay) else H


def marked(H) -> Point:
    """The marked point, computed from the term without building its space."""
    if isinstance(H, BaseStep):
        return Ord(OMEGA)
    if isinstance(H, (Scale, Shift)):
        return marked(H.inner)
    if isinstance(H, Product):
        return Pair(marked(H.F), marked(H.G))
    if isinstance(H, RenormPower):
        return marked(_power_product(H.F, H.p))
    if isinstance(H, (Union, MarkedDelay)):
        return AtInfinity()
    if isinstance(H, EmbedZero):
        return Ord(H.image.hi)
    return marked_point(space_of(H))


def _member(family: Family, n):
    return family.member_sym() if isinstance(n, Sym) else family.member(n)


@lru_cache(maxsize=None)
def is_usc_d(H) -> bool:
    """Whether the successive differences are upper semicontinuous, by construction."""
    if isinstance(H, (BaseStep, ZeroTerm)):
        return True
    if isinstance(H, (Scale, Shift, Restrict, EmbedZero)):
        return is_usc_d(H.inner)
    if isinstance(H, Product):
        return is_usc_d(H.F) and is_usc_d(H.G) and _h(H.G, INF_INDEX, marked(H.G)) == 0
    if isinstance(H, RenormPower):
        return is_usc_d(H.F) and _h(H.F, INF_INDEX, marked(H.F)) == 0
    if isinstance(H, Union):
        fam = H.family
        members = {fam.member(n) for n in fam.concrete_indices(H.start)}
        if isinstance(fam, ScaledFamily):
            members.add(fam.base)
        if isinstance(fam, ListFamily):
            members.update(fam.prefix + (fam.tail,))
        if isinstance(fam, PowerFamily):
            members.add(fam.base)
        return fam.norm_profile().limit == 0 and all(is_usc_d(m) for m in members)
    if isinstance(H, MarkedDelay):
        return is_usc_d(H.union)
    raise TypeError(H)


# -------------------------------------------------------------- evaluation


def _h(H, k, x) -> Fraction:
    """``h_k(x)`` for concrete or symbolic ``k`` and ``x``; no membership check."""
    if isinstance(H, BaseStep):
        beta = x.beta
        if isinstance(beta, Sym):
            return H.a if index_gt(k, beta) else Fraction(0)
        if beta == OMEGA:
            return Fraction(0)
        return H.a if index_gt(k, beta.to_int()) else Fraction(0)
    if isinstance(H, Scale):
        return H.c * _h(H.inner, k, x) if H.c else Fraction(0)
    if isinstance(H, Shift):
        if k == 0 and isinstance(k, int):
            return Fraction(0)
        return _h(H.inner, k + H.s, x)
    if isinstance(H, Product):
        if x.r == marked(H.G):
            return _h(H.F, k, x.l)
        return _h(H.G, k, x.r)
    if isinstance(H, RenormPower):
        return _h(_power_product(H.F, H.p), k, x) / H.p
    if isinstance(H, Union):
        if isinstance(x, AtInfinity):
            return Fraction(0)
        return _h(_member(H.family, x.index), k, x.inner)
    if isinstance(H, MarkedDelay):
        if isinstance(x, InFamily):
            member = _member(H.union.family, x.index)
            if x.inner == marked(member):
                return H.c if index_gt(k, x.index) else Fraction(0)
        return _h(H.union, k, x)
    if isinstance(H, Restrict):
        return _h(H.inner, k, x)
    if isinstance(H, EmbedZero):
        if isinstance(x, Img):
            return _h(H.inner, k, x.inner)
        if isinstance(x, Off):
            return Fraction(0)
        if not H.image.contains(x):
            return Fraction(0)
        if H.image.chart is None:
            raise ChartUnavailable(f"no chart for the image [0, {H.image.hi}]")
        return _h(H.inner, k, H.image.chart(x.beta))
    if isinstance(H, ZeroTerm):
        return Fraction(0)
    raise TypeError(H)


def _require_point(H, x: Point) -> None:
    if not is_member(space_of(H), x):
        raise ValueError(f"{format_point(x)} is not a point of {format_space(space_of(H))}")


def eval_h(H, k: int, x: Point) -> Fraction:
    _check_term(H)
    if not isinstance(k, int) or k < 0:
        raise ValueError("k must be a natural number")
    _require_point(H, x)
    return _h(H, k, x)


def _max_index(x: Point) -> int:
    """Largest concrete natural number appearing in the address of ``x``."""
    if isinstance(x, Ord):
        return x.beta.to_int() if x.beta.is_finite else 0
    if isinstance(x, InFamily):
        return max(x.index, _max_index(x.inner))
    if isinstance(x, Pair):
        return max(_max_index(x.l), _max_index(x.r))
    return 0


def kvalue_h(H, x: Point) -> KValue:
    """``k -> h_k(x)`` as an exact prefix plus its eventual value."""
    _check_term(H)
    _require_point(H, x)
    limit = _h(H, INF_INDEX, x)
    horizon = _max_index(x) + 2
    if isinstance(H, EmbedZero) and H.image.contains(x) and H.image.chart is not None:
        horizon = _max_index(H.image.chart(x.beta)) + 2
    values = [_h(H, k, x) for k in range(horizon + 1)]
    if values[-1] != limit:
        raise AssertionError("h_k has not reached its limit past every index of the point")
    while values and values[-1] == limit:
        values.pop()
    return KValue(tuple(enumerate(values)), limit)


def eval_limit(H, x: Point) -> Fraction:
    return kvalue_h(H, x).tail


def eval_tau(H, k: int, x: Point) -> Fraction:
    return eval_limit(H, x) - eval_h(H, k, x)


# ----------------------------------------------------- symbolic patterns


def _B(L: int) -> Sym:
    return Sym(L, "B")


@lru_cache(maxsize=None)
def reps(H, L: int) -> tuple:
    """Representative points of every value pattern of ``H`` at level ``L``.

    Symbols ``B_L`` stand for indices beyond any ``k`` or index used at lower
    levels.  The marked point is always included.
    """
    if isinstance(H, BaseStep):
        return (Ord(ZERO), Ord(_B(L)), Ord(OMEGA))
    if isinstance(H, (Scale, Shift)):
        return reps(H.inner, L)
    if isinstance(H, Product):
        mF, mG = marked(H.F), marked(H.G)
        left = tuple(Pair(a, mG) for a in reps(H.F, L))
        right = tuple(Pair(mF, b) for b in reps(H.G, L) if b != mG)
        return left + right
    if isinstance(H, RenormPower):
        return reps(_power_product(H.F, H.p), L)
    if isinstance(H, Union):
        fam = H.family
        out = [AtInfinity()]
        for n in fam.concrete_indices(H.start):
            out.extend(InFamily(n, z) for z in reps(fam.member(n), L))
        out.extend(InFamily(_B(L), z) for z in reps(fam.member_sym(), L))
        return tuple(out)
    if isinstance(H, MarkedDelay):
        return reps(H.union, L)
    if isinstance(H, Restrict):
        sel = H.selector
        if isinstance(sel, IndexSet):
            fam = _union_of(H.inner).family
            return tuple(InFamily(n, z) for n in sorted(sel.indices) for z in reps(fam.member(n), L))
        if _restrict_is_whole(H):
            return reps(H.inner, L)
        if sel.hi.is_finite and isinstance(space_of(H.inner), OmegaSpace):
            return tuple(Ord(Ordinal.of(i)) for i in sorted({0, sel.hi.to_int()}))
        raise OracleUnsupported("restriction to a proper infinite interval")
    if isinstance(H, EmbedZero):
        out = [Img(z) for z in reps(H.inner, L)]
        if H.image.hi < marked_point(H.host).beta:
            out.append(Off(Ord(H.image.hi + 1)))
        return tuple(out)
    if isinstance(H, ZeroTerm):
        return (marked_point(H.space),)
    raise TypeError(H)


def _restrict_is_whole(H: Restrict) -> bool:
    E = space_of(H.inner)
    return isinstance(E, OmegaSpace) and H.selector.hi == marked_point(E).beta


def approach(H, x: Point, L: int) -> tuple:
    """Representatives of the points ``y != x`` that approach ``x``, at level ``L``.

    Empty exactly when every value of ``H`` is locally constant at ``x``
    (in particular at isolated points).
    """
    if isinstance(H, BaseStep):
        return (Ord(_B(L)),) if x.beta == OMEGA else ()
    if isinstance(H, (Scale, Shift)):
        return approach(H.inner, x, L)
    if isinstance(H, Product):
        mG = marked(H.G)
        if x.r != mG:
            # off the slice h depends on the right coordinate alone
            return tuple(Pair(x.l, y) for y in approach(H.G, x.r, L))
        along = tuple(Pair(a, mG) for a in approach(H.F, x.l, L))
        across = tuple(Pair(x.l, y) for y in approach(H.G, mG, L))
        return along + across
    if isinstance(H, RenormPower):
        return approach(_power_product(H.F, H.p), x, L)
    if isinstance(H, Union):
        fam = H.family
        if isinstance(x, AtInfinity):
            return tuple(InFamily(_B(L), z) for z in reps(fam.member_sym(), L))
        return tuple(InFamily(x.index, z) for z in approach(_member(fam, x.index), x.inner, L))
    if isinstance(H, MarkedDelay):
        return approach(H.union, x, L)
    if isinstance(H, Restrict):
        if isinstance(H.selector, IndexSet):
            return approach(H.inner, x, L)
        if _restrict_is_whole(H):
            return approach(H.inner, x, L)
        return ()
    if isinstance(H, EmbedZero):
        if isinstance(x, Img):
            return tuple(Img(z) for z in approach(H.inner, x.inner, L))
        return ()
    if isinstance(H, ZeroTerm):
        return ()
    raise TypeError(H)


def point_level(x) -> int:
    """One more than the highest symbol level in ``x``; 0 for concrete points."""
    if isinstance(x, Ord):
        return x.beta.level + 1 if isinstance(x.beta, Sym) else 0
    if isinstance(x, InFamily):
        own = x.index.level + 1 if isinstance(x.index, Sym) else 0
        return max(own, point_level(x.inner))
    if isinstance(x, Pair):
        return max(point_level(x.l), point_level(x.r))
    if isinstance(x, (Img, Off)):
        return point_level(x.inner if isinstance(x, Img) else x.point)
    return 0


def instantiate(x, n: int):
    """Replace every symbol ``B_L`` in ``x`` by the concrete index ``n + L``."""
    if isinstance(x, Ord):
        return Ord(Ordinal.of(n + x.beta.level)) if isinstance(x.beta, Sym) else x
    if isinstance(x, InFamily):
        idx = n + x.index.level if isinstance(x.index, Sym) else x.index
        return InFamily(idx, instantiate(x.inner, n))
    if isinstance(x, Pair):
        return Pair(instantiate(x.l, n), instantiate(x.r, n))
    if isinstance(x, Img):
        return Img(instantiate(x.inner, n))
    if isinstance(x, Off):
        return Off(instantiate(x.point, n))
    return x


def to_host(H, x):
    """Concrete host coordinates for an oracle point, when they exist."""
    if isinstance(x, Off):
        return x.point
    if isinstance(x, Img):
        if isinstance(H, EmbedZero) and H.image.chart_name == "identity":
            return x.inner
        return None
    return x


def concrete_witnesses(H, sizes=(1, 6)) -> list:
    """Concrete points obtained from the level-0 representatives.

    Each symbol is replaced by a few concrete indices; points of embedded
    terms stay in the inner coordinates (``Img``) unless the chart is the identity.
    """
    seen, out = set(), []
    for x in reps(H, 0):
        for n in sizes:
            y = instantiate(x, n)
            if y in seen:
                continue
            host = to_host(H, y)
            if host is not None and not is_member(space_of(H), host):
                continue
            seen.add(y)
            out.append(y)
    return out


def _eval_any(H, k, x) -> Fraction:
    """``h_k`` at a concrete, symbolic, or inner-coordinate point."""
    return _h(H, k, x)


# --------------------------------------------------------- point functions


class PointFunction:
    """A bounded function on a space, with an exact limsup at every point.

    ``limsup(x)`` returns the limsup of ``f(y)`` as ``y -> x`` with ``y != x``,
    or ``None`` when ``x`` is isolated for the function's purposes.
    """

    def __init__(self, fn: Callable, limsup: Callable, bound_: Optional[Fraction], name: str,
                 term=None, space: Optional[SpaceTerm] = None):
        self.fn = fn
        self.limsup = limsup
        self.bound = bound_
        self.name = name
        self.term = term
        self.space = space if space is not None else (space_of(term) if term is not None else None)

    def __call__(self, x: Point) -> Fraction:
        return self.fn(x)

    def tail_limsup(self, x: Point, basis_index: Optional[int] = None) -> KValue:
        """The eventual value of ``sup f`` over the punctured basis neighbourhoods of ``x``.

        Only the tail is materialized; ``basis_index`` is accepted for the
        handle contract and does not change the answer.
        """
        v = self.limsup(x)
        return KValue((), Fraction(0) if v is None else v)

    def __add__(self, other: "PointFunction") -> "PointFunction":
        return _combine(self, other, lambda a, b: a + b, "+")

    def __sub__(self, other: "PointFunction") -> "PointFunction":
        return _combine(self, other, lambda a, b: a - b, "-")

    def __repr__(self) -> str:
        return f"PointFunction({self.name})"


def _term_function(H, fn: Callable, bound_: Fraction, name: str) -> PointFunction:
    def limsup(x):
        ys = approach(H, x, point_level(x))
        return max((fn(y) for y in ys), default=None)

    return PointFunction(fn, limsup, bound_, name, term=H)


def _combine(f: PointFunction, g: PointFunction, op, sym: str) -> PointFunction:
    fn = lambda x: op(f(x), g(x))
    name = f"({f.name} {sym} {g.name})"
    if f.term is not None and f.term == g.term:
        return _term_function(f.term, fn, None if f.bound is None or g.bound is None else f.bound + g.bound, name)
    for const, other, first in ((f, g, True), (g, f, False)):
        if const.term is None and getattr(const, "constant", None) is not None:
            c = const.constant

            def limsup(x, other=other, c=c, first=first):
                v = other.limsup(x)
                return None if v is None else (op(c, v) if first else op(v, c))

            b = None if other.bound is None else other.bound + abs(c)
            return PointFunction(fn, limsup, b, name, term=other.term, space=other.space)
    raise ValueError("point functions combine exactly only over the same term or with a constant")


def h_function(H, k) -> PointFunction:
    return _term_function(H, lambda x: _h(H, k, x), bound(H), f"h_{k}")


def tau_function(H, k) -> PointFunction:
    return _term_function(H, lambda x: _h(H, INF_INDEX, x) - _h(H, k, x), bound(H), f"tau_{k}")


def diff_function(H, k: int) -> PointFunction:
    """``h_{k+1} - h_k``."""
    return _term_function(H, lambda x: _h(H, k + 1, x) - _h(H, k, x), bound(H), f"h_{k + 1}-h_{k}")


def constant_function(c, space: Optional[SpaceTerm] = None) -> PointFunction:
    c = rat(c)
    f = PointFunction(lambda x: c, lambda x: c, abs(c), fmt_rat(c), space=space)
    f.constant = c
    return f


def indicator_function(point: Point, value=1, space: Optional[SpaceTerm] = None) -> PointFunction:
    """``value`` at ``point`` and 0 elsewhere; its limsup at any point is 0."""
    value = rat(value)
    return PointFunction(
        lambda x: value if x == point else Fraction(0),
        lambda x: Fraction(0),
        abs(value),
        f"1[{format_point(point)}]",
        space=space,
    )


def usc_envelope_at(f: PointFunction, E: SpaceTerm, x: Point) -> Fraction:
    """``max(f(x), limsup_{y -> x} f(y))``, exact."""
    if f.bound is None:
        raise ValueError("envelopes of functions without a finite bound are not supported")
    if f.space is not None and f.space != E:
        raise ValueError("the function is defined on a different space")
    if point_level(x) == 0 and not isinstance(x, (Img, Off)) and not is_member(E, x):
        raise ValueError(f"{format_point(x)} is not a point of {format_space(E)}")
    if point_level(x) == 0 and not isinstance(x, (Img, Off)) and rank(E, x).is_zero:
        return f(x)
    v = f.limsup(x)
    return f(x) if v is None else max(f(x), v)


# ----------------------------------------------------- uniform dominance


@dataclass(frozen=True)
class DominanceResult:
    status: str  # "Yes" | "No" | "Unknown"
    witness: Optional[tuple] = None  # (eps, k, point) for "No"
    reason: str = ""


def _certificate(H, F) -> Optional[str]:
    if H == F:
        return "identity: l = k"
    if isinstance(F, Shift) and F.inner == H:
        return f"shift: l = k + {F.s}"
    if isinstance(H, Shift) and H.inner == F:
        return "shift: l = k"
    if isinstance(H, Scale) and H.inner == F and H.c >= 1:
        return "scale >= 1: l = k"
    return None


def uniform_dominates(H, F, eps_grid, k_bound: int) -> DominanceResult:
    """Does ``H`` uniformly dominate ``F``: for each eps and k some l has ``f_k <= h_l + eps``?

    ``Yes`` needs a structural certificate valid for all k.  ``No`` is returned
    when ``f_k(x) > h(x) + eps`` at a witness point, which rules out every l.
    """
    if space_of(H) != space_of(F):
        raise ValueError("uniform domination compares sequences on the same space")
    cert = _certificate(H, F)
    if cert:
        return DominanceResult("Yes", reason=cert)
    points = []
    for x in concrete_witnesses(H, (1, k_bound + 1)) + concrete_witnesses(F, (1, k_bound + 1)):
        if x not in points:
            points.append(x)
    for eps in (rat(e) for e in eps_grid):
        for k in range(k_bound + 1):
            for x in points:
                if _h(F, k, x) > _h(H, INF_INDEX, x) + eps:
                    return DominanceResult("No", (eps, k, x), "f_k exceeds h + eps")
    return DominanceResult("Unknown", reason="no certificate and no violation among the witnesses")


# ---------------------------------------------------------- property (P)


def _isolated_near(H, t, depth: int) -> list:
    out, frontier = [], list(approach(H, t, point_level(t)))
    for _ in range(depth):
        nxt = []
        for y in frontier:
            sub = approach(H, y, point_level(y))
            (nxt.extend(sub) if sub else out.append(y))
        frontier = nxt
        if not frontier:
            return out
    raise OracleUnsupported("isolated representatives not reached within the probe depth")


def has_property_P(H, t: Point, k: int, probe_depth: int = 8) -> bool:
    """Whether ``tau_k`` has a limit along isolated points converging to ``t``.

    Every pattern of isolated points near ``t`` is represented symbolically;
    the limit exists exactly when all of them give the same ``tau_k`` value.
    """
    _require_point(H, t)
    if rank(space_of(H), t).is_zero:
        raise ValueError("property (P) concerns non-isolated points")
    values = {_h(H, INF_INDEX, y) - _h(H, k, y) for y in _isolated_near(H, t, probe_depth)}
    return len(values) <= 1


# ------------------------------------------------------- JSON and literals


def _seq_json(s: ConvergentSeq) -> dict:
    return s.to_json()


def term_to_json(H) -> dict:
    """Node tree with bounds and norm-profile metadata."""
    out = {"bound": fmt_rat(bound(H)), "node": type(H).__name__}
    if isinstance(H, BaseStep):
        out["a"] = fmt_rat(H.a)
    elif isinstance(H, Scale):
        out.update(c=fmt_rat(H.c), inner=term_to_json(H.inner))
    elif isinstance(H, Shift):
        out.update(s=H.s, inner=term_to_json(H.inner))
    elif isinstance(H, Product):
        out.update(F=term_to_json(H.F), G=term_to_json(H.G))
    elif isinstance(H, RenormPower):
        out.update(F=term_to_json(H.F), p=H.p)
    elif isinstance(H, Union):
        fam = H.family
        desc = {"kind": type(fam).__name__}
        if isinstance(fam, (ScaledFamily, PowerFamily)):
            desc.update(base=term_to_json(fam.base), scale=_seq_json(fam.scale))
        elif isinstance(fam, ListFamily):
            desc.update(prefix=[term_to_json(t) for t in fam.prefix], tail=term_to_json(fam.tail))
        else:
            desc.update(key=fam.key)
        out.update(family=desc, norm_profile=_seq_json(fam.norm_profile()), start=H.start)
    elif isinstance(H, MarkedDelay):
        out.update(c=fmt_rat(H.c), cap=fmt_rat(H.cap), union=term_to_json(H.union))
    elif isinstance(H, Restrict):
        sel = H.selector
        out.update(
            inner=term_to_json(H.inner),
            selector=(f"[0,{sel.hi}]" if isinstance(sel, InitialInterval) else sorted(sel.indices)),
        )
    elif isinstance(H, EmbedZero):
        out.update(chart=H.image.chart_name, host=format_space(H.host), image=f"[0,{H.image.hi}]",
                   inner=term_to_json(H.inner))
    elif isinstance(H, ZeroTerm):
        out["space"] = format_space(H.space)
    return out


def format_term(H) -> str:
    """Literal form; terms built from ``seq``-families print but do not parse back."""
    if isinstance(H, BaseStep):
        return f"base({fmt_rat(H.a)})"
    if isinstance(H, Scale):
        return f"scale({format_term(H.inner)},{fmt_rat(H.c)})"
    if isinstance(H, Shift):
        return f"shift({format_term(H.inner)},{H.s})"
    if isinstance(H, Product):
        return f"prod({format_term(H.F)},{format_term(H.G)})"
    if isinstance(H, RenormPower):
        return f"power({format_term(H.F)},{H.p})"
    if isinstance(H, Union):
        fam = H.family
        if isinstance(fam, ScaledFamily):
            return f"union({format_term(fam.base)},from={H.start},c={fam.scale})"
        if isinstance(fam, PowerFamily):
            return f"powers({format_term(fam.base)},from={H.start},c={fam.scale})"
        if isinstance(fam, ListFamily):
            items = ";".join(format_term(t) for t in fam.prefix)
            return f"list({items}|{format_term(fam.tail)},from={H.start})"
        return f"seq<{fam.key}>(from={H.start})"
    if isinstance(H, MarkedDelay):
        return f"delay({format_term(H.union)},{fmt_rat(H.c)},cap={fmt_rat(H.cap)})"
    if isinstance(H, Restrict):
        sel = H.selector
        if isinstance(sel, InitialInterval):
            return f"restrict({format_term(H.inner)},[0,{sel.hi}])"
        return f"restrict({format_term(H.inner)},{{{','.join(map(str, sorted(sel.indices)))}}})"
    if isinstance(H, EmbedZero):
        return f"embed({format_term(H.inner)},{format_space(H.host)},[0,{H.image.hi}])"
    if isinstance(H, ZeroTerm):
        return f"zero({format_space(H.space)})"
    raise TypeError(H)


def parse_rational_fn(text: str) -> ExplicitRational:
    """Parse an expression in ``n`` such as ``n/(n+1)`` or ``1/n^2``."""
    import sympy

    n = sympy.Symbol("n")
    expr = sympy.sympify(text.replace("^", "**"), locals={"n": n})
    if expr.free_symbols - {n}:
        raise ValueError(f"only the variable n may appear in {text!r}")
    num, den = sympy.fraction(sympy.together(expr))
    pn, pd = sympy.Poly(num, n), sympy.Poly(den, n)
    coeffs = [c for c in pn.all_coeffs() + pd.all_coeffs()]
    if not all(c.is_rational for c in coeffs):
        raise ValueError(f"coefficients of {text!r} must be rational")
    scale_ = math.lcm(*[int(sympy.Rational(c).q) for c in coeffs])
    as_ints = lambda p: tuple(int(sympy.Rational(c) * scale_) for c in reversed(p.all_coeffs()))
    num_t, den_t = as_ints(pn), as_ints(pd)
    if den_t[-1] < 0:
        num_t, den_t = tuple(-c for c in num_t), tuple(-c for c in den_t)
    limit = Fraction(num_t[-1], den_t[-1]) if len(_poly_trim(num_t)) == len(den_t) else Fraction(0)
    if len(_poly_trim(num_t)) > len(den_t):
        raise ValueError(f"{text!r} diverges")
    seq = ExplicitRational(num_t, den_t, limit)
    step = seq._step()
    mono = None
    if _nonneg_from(step, 1):
        mono = "increasing"
    elif _nonneg_from(tuple(-c for c in step), 1):
        mono = "decreasing"
    return ExplicitRational(num_t, den_t, limit, mono)


class _TermParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise ValueError(f"{msg} at position {self.pos} in {self.text!r}")

    def args(self) -> list:
        """Split the parenthesized argument list at top-level commas."""
        if self.text[self.pos] != "(":
            self.error("expected '('")
        depth, start, parts = 0, self.pos + 1, []
        i = self.pos
        while i < len(self.text):
            ch = self.text[i]
            if ch in "([{":
                depth += 1
            elif ch in ")]}":
                depth -= 1
                if depth == 0:
                    parts.append(self.text[start:i].strip())
                    self.pos = i + 1
                    return parts
            elif ch == "," and depth == 1:
                parts.append(self.text[start:i].strip())
                start = i + 1
            i += 1
        self.error("unbalanced parentheses")

    def term(self):
        name_end = self.text.find("(", self.pos)
        if name_end < 0:
            self.error("expected a constructor")
        name = self.text[self.pos:name_end].strip()
        self.pos = name_end
        args = self.args()
        is_kw = lambda a: re.match(r"[A-Za-z_]\w*\s*=", a) is not None
        kw = dict((k.strip(), v) for k, v in (a.split("=", 1) for a in args if is_kw(a)))
        pos_args = [a for a in args if not is_kw(a)]
        sub = lambda s: parse_term(s)
        if name == "base":
            return base_step(rat(pos_args[0]))
        if name == "scale":
            return scale(sub(pos_args[0]), rat(pos_args[1]))
        if name == "shift":
            return shift(sub(pos_args[0]), int(pos_args[1]))
        if name == "prod":
            return product(sub(pos_args[0]), sub(pos_args[1]))
        if name == "power":
            return renorm_power(sub(pos_args[0]), int(pos_args[1]))
        if name in ("union", "powers"):
            start = int(kw.get("from", "1"))
            c = parse_rational_fn(kw.get("c", "1"))
            base = sub(pos_args[0])
            fam = ScaledFamily(base, c) if name == "union" else PowerFamily(base, c)
            return union(fam, start)
        if name == "list":
            start = int(kw.get("from", "0"))
            body, _, tail = pos_args[0].rpartition("|")
            items = tuple(sub(s) for s in _split_top(body, ";")) if body else ()
            return union(ListFamily(items, sub(tail), start), start)
        if name == "delay":
            return marked_delay(sub(pos_args[0]), rat(pos_args[1]), rat(kw["cap"]))
        if name == "restrict":
            inner, sel = sub(pos_args[0]), pos_args[1]
            if sel.startswith("["):
                lo, hi = sel[1:-1].split(",", 1)
                if lo.strip() != "0":
                    self.error("intervals start at 0")
                return restrict(inner, InitialInterval(parse_ordinal(hi)))
            if sel.startswith("{"):
                return restrict(inner, IndexSet(frozenset(int(s) for s in sel[1:-1].split(","))))
            self.error("expected [0,hi] or {i,...}")
        if name == "zero":
            return zero_term(parse_space(pos_args[0]))
        self.error(f"unknown constructor {name!r}")


def _split_top(text: str, sep: str) -> list:
    depth, start, out = 0, 0, []
    for i, ch in enumerate(text):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append(text[start:i].strip())
            start = i + 1
    out.append(text[start:].strip())
    return out


def parse_term(text: str):
    """Parse a candidate-term literal.

    Grammar: ``base(a)``, ``scale(T,c)``, ``shift(T,s)``, ``prod(T,U)``,
    ``power(T,p)``, ``union(T,from=N,c=EXPR)``, ``powers(T,from=N,c=EXPR)``,
    ``list(T1;T2|TAIL,from=N)``, ``delay(U,c,cap=b)``, ``restrict(T,[0,hi])``,
    ``restrict(U,{i,j})``, ``zero(SPACE)``.  ``EXPR`` is a rational function of ``n``.
    """
    p = _TermParser(text.strip())
    H = p.term()
    if p.pos != len(p.text):
        p.error("trailing input")
    return H

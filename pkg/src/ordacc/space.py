"""Symbolic countable compact spaces, their points, and Cantor-Bendixson ranks.

Spaces are immutable terms:

* ``OmegaSpace(alpha, n)``: the ordinal interval ``[0, w^alpha * n]``;
* ``OnePointUnion(family, start)``: one-point compactification of the disjoint
  union of ``family.member(i)`` for ``i >= start``; the added point is ``AtInfinity``;
* ``MarkedProduct(left, right)``: product with marked point (0_left, 0_right);
* ``ClopenRestrict(parent, selector)``: an initial interval of an ``OmegaSpace``
  or a finite set of members of a ``OnePointUnion``.

Points are ``Ord(beta)``, ``AtInfinity()``, ``InFamily(i, inner)``, ``Pair(l, r)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache, total_ordering
from typing import Callable, Optional, Union

from .ordinal import (
    ONE,
    ZERO,
    Ordinal,
    fundamental_seq,
    left_subtract,
    natural_sum,
    nat_mul,
    omega_pow,
    ordinal,
    parse as parse_ordinal,
)

__all__ = [
    "Sym",
    "INF_INDEX",
    "index_gt",
    "Ord",
    "AtInfinity",
    "InFamily",
    "Pair",
    "Point",
    "OmegaSpace",
    "OnePointUnion",
    "MarkedProduct",
    "ClopenRestrict",
    "InitialInterval",
    "IndexSet",
    "RankProfile",
    "SpaceFamily",
    "SpaceTerm",
    "Interval",
    "TailMembers",
    "Members",
    "InMember",
    "ProductNbhd",
    "Singleton",
    "IsolatedPoints",
    "ComplementOfFinite",
    "ExplicitUnion",
    "NonMemberError",
    "omega_space",
    "one_point_union",
    "marked_product",
    "clopen_restrict",
    "marked_point",
    "is_member",
    "is_isolated",
    "rank",
    "cb_rank",
    "top_rank_count",
    "canonical_class",
    "rho",
    "tail_basis",
    "relative_rank",
    "relative_cb_rank",
    "sup_of_sequence",
    "parse_space",
    "parse_point",
    "format_point",
    "format_space",
]


class NonMemberError(ValueError):
    pass


# ------------------------------------------------------- symbolic indices


@total_ordering
@dataclass(frozen=True)
class Sym:
    """A symbolic natural number, larger than every concrete integer.

    Symbols are ordered by ``(level, kind)`` with kind ``"K"`` below ``"B"``.
    They stand for "a large enough k" and "a point index beyond k" in
    iterated limits, one level per nesting of the limit operations.
    """

    level: int
    kind: str  # "K" or "B"

    def key(self) -> tuple[int, int]:
        return (self.level, 0 if self.kind == "K" else 1)

    def __lt__(self, other) -> bool:
        if isinstance(other, Sym):
            return self.key() < other.key()
        if isinstance(other, _InfIndex):
            return True
        return False  # concrete integers are always smaller

    def __add__(self, other: int) -> "Sym":
        return self

    def __str__(self) -> str:
        return f"{self.kind}{self.level}"


class _InfIndex:
    """The index at infinity: evaluating ``h_k`` there yields ``h = lim h_k``."""

    def __repr__(self) -> str:
        return "INF_INDEX"

    def __add__(self, other):
        return self


INF_INDEX = _InfIndex()

Index = Union[int, Sym, _InfIndex]


def index_gt(k: Index, n: Index) -> bool:
    """``k > n`` for concrete or symbolic indices."""
    if isinstance(k, _InfIndex):
        return not isinstance(n, _InfIndex)
    if isinstance(n, _InfIndex):
        return False
    if isinstance(k, Sym):
        if isinstance(n, Sym):
            return n.key() < k.key()
        return True
    if isinstance(n, Sym):
        return False
    return k > n


# ------------------------------------------------------------------ points


@dataclass(frozen=True)
class Ord:
    beta: Ordinal  # may be a Sym inside the oracle, standing for a natural number


@dataclass(frozen=True)
class AtInfinity:
    pass


@dataclass(frozen=True)
class InFamily:
    index: int
    inner: "Point"


@dataclass(frozen=True)
class Pair:
    l: "Point"
    r: "Point"


Point = Union[Ord, AtInfinity, InFamily, Pair]


def format_point(x: Point) -> str:
    if isinstance(x, Ord):
        return f"o:{x.beta}"
    if isinstance(x, AtInfinity):
        return "inf"
    if isinstance(x, InFamily):
        return f"in({x.index},{format_point(x.inner)})"
    if isinstance(x, Pair):
        return f"pair({format_point(x.l)},{format_point(x.r)})"
    raise TypeError(x)


# ------------------------------------------------------------------ spaces


@dataclass(frozen=True)
class RankProfile:
    """Closed-form description of the member CB ranks of a union stream.

    ``kind == "eventually-constant"``: ``cb(member n) == limit`` for ``n >= settle``.
    ``kind == "increasing"``: ``cb(member n)`` strictly increases with supremum ``limit``.
    ``cb_of`` gives the value at each index.
    """

    kind: str
    limit: Ordinal
    cb_of: Callable[[int], Ordinal] = field(compare=False, repr=False)
    settle: int = 0

    def __post_init__(self):
        if self.kind not in ("eventually-constant", "increasing"):
            raise ValueError(f"unknown rank profile kind {self.kind!r}")
        if self.kind == "increasing" and not self.limit.is_limit:
            raise ValueError("an increasing rank profile needs a limit ordinal supremum")


@dataclass(frozen=True)
class SpaceFamily:
    """An indexed stream of spaces; equality is by ``key``."""

    key: str
    member_fn: Callable[[int], "SpaceTerm"] = field(compare=False, repr=False)
    profile: RankProfile = field(compare=False, repr=False)

    def member(self, i: int) -> "SpaceTerm":
        return _member_cached(self, i)


@lru_cache(maxsize=4096)
def _member_cached(family: SpaceFamily, i: int) -> "SpaceTerm":
    return family.member_fn(i)


@dataclass(frozen=True)
class OmegaSpace:
    alpha: Ordinal
    n: int


@dataclass(frozen=True)
class OnePointUnion:
    family: SpaceFamily
    start: int


@dataclass(frozen=True)
class MarkedProduct:
    left: "SpaceTerm"
    right: "SpaceTerm"


@dataclass(frozen=True)
class InitialInterval:
    hi: Ordinal


@dataclass(frozen=True)
class IndexSet:
    indices: frozenset


@dataclass(frozen=True)
class ClopenRestrict:
    parent: "SpaceTerm"
    selector: Union[InitialInterval, IndexSet]


SpaceTerm = Union[OmegaSpace, OnePointUnion, MarkedProduct, ClopenRestrict]


def omega_space(alpha, n: int = 1) -> OmegaSpace:
    if not isinstance(n, int) or n < 1:
        raise ValueError("OmegaSpace needs a positive multiplicity n")
    return OmegaSpace(ordinal(alpha), n)


def one_point_union(family: SpaceFamily, start: int = 0, check: bool = True) -> OnePointUnion:
    if start < 0:
        raise ValueError("start index must be a natural number")
    E = OnePointUnion(family, start)
    if check:
        _spot_check_profile(E)
    return E


def marked_product(left: SpaceTerm, right: SpaceTerm) -> MarkedProduct:
    return MarkedProduct(left, right)


def clopen_restrict(parent: SpaceTerm, selector) -> ClopenRestrict:
    if isinstance(selector, InitialInterval):
        if not isinstance(parent, OmegaSpace):
            raise ValueError("initial intervals restrict OmegaSpace terms only")
        # [0, hi] = [0, hi+1) is always clopen in the order topology
        if selector.hi > _top(parent):
            raise ValueError("interval exceeds the space")
    elif isinstance(selector, IndexSet):
        if not isinstance(parent, OnePointUnion):
            raise ValueError("index sets restrict OnePointUnion terms only")
        if not selector.indices or min(selector.indices) < parent.start:
            raise ValueError("index set must be non-empty and within the stream")
    else:
        raise TypeError(selector)
    return ClopenRestrict(parent, selector)


def _top(E: OmegaSpace) -> Ordinal:
    return nat_mul(omega_pow(E.alpha), E.n)


def _spot_check_profile(E: OnePointUnion) -> None:
    prof = E.family.profile
    for i in range(E.start, E.start + 3):
        declared = prof.cb_of(i)
        actual = cb_rank(E.family.member(i))
        if declared != actual:
            raise ValueError(
                f"declared rank profile gives cb {declared} for member {i}, actual {actual}"
            )
        if prof.kind == "increasing" and not declared < prof.limit:
            raise ValueError("increasing rank profile member reaches its declared supremum")
        if prof.kind == "eventually-constant" and i >= prof.settle and declared != prof.limit:
            raise ValueError("eventually-constant rank profile disagrees with its tail value")


def marked_point(E: SpaceTerm) -> Point:
    if isinstance(E, OmegaSpace):
        return Ord(_top(E))
    if isinstance(E, OnePointUnion):
        return AtInfinity()
    if isinstance(E, MarkedProduct):
        return Pair(marked_point(E.left), marked_point(E.right))
    if isinstance(E, ClopenRestrict):
        m = marked_point(E.parent)
        if is_member(E, m):
            return m
        if isinstance(E.selector, InitialInterval):
            return Ord(E.selector.hi)
        i = max(E.selector.indices)
        return InFamily(i, marked_point(E.parent.family.member(i)))
    raise TypeError(E)


# -------------------------------------------------------------- membership


def is_member(E: SpaceTerm, x: Point) -> bool:
    if isinstance(E, OmegaSpace):
        return isinstance(x, Ord) and isinstance(x.beta, Ordinal) and x.beta <= _top(E)
    if isinstance(E, OnePointUnion):
        if isinstance(x, AtInfinity):
            return True
        return (
            isinstance(x, InFamily)
            and isinstance(x.index, int)
            and x.index >= E.start
            and is_member(E.family.member(x.index), x.inner)
        )
    if isinstance(E, MarkedProduct):
        return isinstance(x, Pair) and is_member(E.left, x.l) and is_member(E.right, x.r)
    if isinstance(E, ClopenRestrict):
        if not is_member(E.parent, x):
            return False
        if isinstance(E.selector, InitialInterval):
            return x.beta <= E.selector.hi
        return isinstance(x, InFamily) and x.index in E.selector.indices
    raise TypeError(E)


def _require_member(E: SpaceTerm, x: Point) -> None:
    if not is_member(E, x):
        raise NonMemberError(f"{format_point(x)} is not a point of {format_space(E)}")


# ------------------------------------------------------------------ ranks


def rank(E: SpaceTerm, x: Point) -> Ordinal:
    """Cantor-Bendixson rank of the point ``x``."""
    _require_member(E, x)
    return _rank(E, x)


def _rank(E: SpaceTerm, x: Point) -> Ordinal:
    if isinstance(E, OmegaSpace):
        return x.beta.last_exponent
    if isinstance(E, OnePointUnion):
        if isinstance(x, AtInfinity):
            return E.family.profile.limit
        return _rank(E.family.member(x.index), x.inner)
    if isinstance(E, MarkedProduct):
        return natural_sum(_rank(E.left, x.l), _rank(E.right, x.r))
    if isinstance(E, ClopenRestrict):
        return _rank(E.parent, x)
    raise TypeError(E)


def is_isolated(E: SpaceTerm, x: Point) -> bool:
    return rank(E, x).is_zero


def cb_rank(E: SpaceTerm) -> Ordinal:
    """|E|_CB: one more than the largest point rank."""
    if isinstance(E, OmegaSpace):
        return E.alpha + 1
    if isinstance(E, OnePointUnion):
        prof = E.family.profile
        at_inf = prof.limit + 1
        if prof.kind == "increasing":
            return at_inf
        head = [prof.cb_of(i) for i in range(E.start, max(E.start, prof.settle))]
        return max(head + [at_inf])
    if isinstance(E, MarkedProduct):
        top = natural_sum(_max_rank(E.left), _max_rank(E.right))
        return top + 1
    if isinstance(E, ClopenRestrict):
        if isinstance(E.selector, InitialInterval):
            hi = E.selector.hi
            return (hi.leading_exponent if hi else ZERO) + 1
        return max(cb_rank(E.parent.family.member(i)) for i in E.selector.indices)
    raise TypeError(E)


def _max_rank(E: SpaceTerm) -> Ordinal:
    c = cb_rank(E)
    return c.predecessor()


def top_rank_count(E: SpaceTerm) -> int:
    """Number of points of maximal rank."""
    if isinstance(E, OmegaSpace):
        # [0, n] is discrete with n+1 points
        return E.n + 1 if E.alpha.is_zero else E.n
    if isinstance(E, OnePointUnion):
        c = cb_rank(E)
        prof = E.family.profile
        count = 1 if prof.limit + 1 == c else 0
        if prof.kind == "eventually-constant":
            for i in range(E.start, max(E.start, prof.settle)):
                member = E.family.member(i)
                if cb_rank(member) == c:
                    count += top_rank_count(member)
        return count
    if isinstance(E, MarkedProduct):
        return top_rank_count(E.left) * top_rank_count(E.right)
    if isinstance(E, ClopenRestrict):
        if isinstance(E.selector, InitialInterval):
            hi = E.selector.hi
            return hi.to_int() + 1 if hi.is_finite else hi.leading_coefficient
        c = cb_rank(E)
        return sum(
            top_rank_count(E.parent.family.member(i))
            for i in E.selector.indices
            if cb_rank(E.parent.family.member(i)) == c
        )
    raise TypeError(E)


def canonical_class(E: SpaceTerm) -> tuple[Ordinal, int]:
    return cb_rank(E), top_rank_count(E)


def rho(E: SpaceTerm) -> Ordinal:
    """|E|_CB - 1 when finite, |E|_CB when infinite."""
    c = cb_rank(E)
    return c.predecessor() if c.is_finite else c


# ------------------------------------------------------- neighbourhoods


@dataclass(frozen=True)
class Interval:
    """``]lo, hi]`` in an ordinal space; ``lo=None`` means ``[0, hi]``."""

    lo: Optional[Ordinal]
    hi: Ordinal

    def contains(self, x: Point) -> bool:
        return isinstance(x, Ord) and (self.lo is None or x.beta > self.lo) and x.beta <= self.hi

    def __str__(self) -> str:
        return f"[0, {self.hi}]" if self.lo is None else f"]{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class Singleton:
    point: Point

    def contains(self, x: Point) -> bool:
        return x == self.point

    def __str__(self) -> str:
        return "{" + format_point(self.point) + "}"


@dataclass(frozen=True)
class TailMembers:
    """The point at infinity together with all members of index ``> after``."""

    after: int

    def contains(self, x: Point) -> bool:
        return isinstance(x, AtInfinity) or (isinstance(x, InFamily) and x.index > self.after)

    def __str__(self) -> str:
        return f"{{inf}} + members > {self.after}"


@dataclass(frozen=True)
class Members:
    indices: frozenset

    def contains(self, x: Point) -> bool:
        return isinstance(x, InFamily) and x.index in self.indices

    def __str__(self) -> str:
        return f"members {sorted(self.indices)}"


@dataclass(frozen=True)
class InMember:
    index: int
    inner: object

    def contains(self, x: Point) -> bool:
        return isinstance(x, InFamily) and x.index == self.index and self.inner.contains(x.inner)

    def __str__(self) -> str:
        return f"in({self.index}, {self.inner})"


@dataclass(frozen=True)
class ProductNbhd:
    left: object
    right: object

    def contains(self, x: Point) -> bool:
        return isinstance(x, Pair) and self.left.contains(x.l) and self.right.contains(x.r)

    def __str__(self) -> str:
        return f"{self.left} x {self.right}"


def tail_basis(E: SpaceTerm, x: Point, i: int):
    """The ``i``-th member of a decreasing clopen neighbourhood basis at ``x``."""
    _require_member(E, x)
    if _rank(E, x).is_zero:
        raise ValueError(f"{format_point(x)} is isolated; its basis is the singleton")
    return _basis(E, x, i)


def _basis(E: SpaceTerm, x: Point, i: int):
    if _rank(E, x).is_zero:
        return Singleton(x)
    if isinstance(E, OmegaSpace):
        return Interval(fundamental_seq(x.beta, i), x.beta)
    if isinstance(E, OnePointUnion):
        if isinstance(x, AtInfinity):
            return TailMembers(max(i, E.start - 1))
        return InMember(x.index, _basis(E.family.member(x.index), x.inner, i))
    if isinstance(E, MarkedProduct):
        return ProductNbhd(_basis(E.left, x.l, i), _basis(E.right, x.r, i))
    if isinstance(E, ClopenRestrict):
        return _basis(E.parent, x, i)
    raise TypeError(E)


# ------------------------------------------------------ relative ranks


@dataclass(frozen=True)
class IsolatedPoints:
    pass


@dataclass(frozen=True)
class ComplementOfFinite:
    points: frozenset = frozenset()


@dataclass(frozen=True)
class ExplicitUnion:
    """Clopen pieces, each carrying its own selector; the pieces must cover the space."""

    pieces: tuple  # of (piece descriptor, selector)


def relative_rank(T: SpaceTerm, X, t: Point) -> Ordinal:
    """r_X(t) for the relative derivative driven by points of ``X``."""
    _require_member(T, t)
    if isinstance(X, IsolatedPoints):
        return ZERO if _rank(T, t).is_zero else ONE
    if isinstance(X, ComplementOfFinite):
        # accumulation is unaffected by deleting finitely many points
        return _rank(T, t)
    if isinstance(X, ExplicitUnion):
        for piece, sel in X.pieces:
            if piece.contains(t):
                return relative_rank(T, sel, t)
        raise ValueError(f"{format_point(t)} lies in no piece of the explicit union")
    raise TypeError(X)


def relative_cb_rank(T: SpaceTerm, X) -> Ordinal:
    if isinstance(X, IsolatedPoints):
        return ONE if cb_rank(T) == ONE else Ordinal.of(2)
    if isinstance(X, ComplementOfFinite):
        return cb_rank(T)
    if isinstance(X, ExplicitUnion):
        _check_cover(T, X)
        best = ZERO
        for piece, sel in X.pieces:
            sub = _piece_space(T, piece)
            if sub is None:
                continue
            best = max(best, relative_cb_rank(sub, sel))
        return best
    raise TypeError(X)


def _piece_space(T: SpaceTerm, piece) -> Optional[SpaceTerm]:
    """The piece as a space term (``None`` when empty)."""
    if isinstance(T, OmegaSpace) and isinstance(piece, Interval):
        lo = piece.lo
        if lo is None:
            return ClopenRestrict(T, InitialInterval(piece.hi))
        if lo >= piece.hi:
            return None
        length = left_subtract(lo + 1, piece.hi)  # [lo+1, hi] has order type length+1
        return _interval_space(length)
    if isinstance(T, OnePointUnion) and isinstance(piece, Members):
        return ClopenRestrict(T, IndexSet(frozenset(piece.indices)))
    if isinstance(T, OnePointUnion) and isinstance(piece, TailMembers):
        return OnePointUnion(T.family, max(T.start, piece.after + 1))
    raise ValueError(f"unsupported piece {piece} for {format_space(T)}")


def _interval_space(length: Ordinal) -> SpaceTerm:
    if length.is_zero:
        return ClopenRestrict(OmegaSpace(ZERO, 1), InitialInterval(ZERO))
    # [0, length] is homeomorphic to an OmegaSpace restricted to an initial interval
    e = length.leading_exponent
    return ClopenRestrict(OmegaSpace(e, length.leading_coefficient + 1), InitialInterval(length))


def _check_cover(T: SpaceTerm, X: ExplicitUnion) -> None:
    pieces = [p for p, _ in X.pieces]
    if isinstance(T, OmegaSpace):
        spans = sorted(
            ((p.lo if p.lo is not None else None), p.hi) for p in pieces if isinstance(p, Interval)
        )
        if len(spans) != len(pieces):
            raise ValueError("ordinal spaces are split by intervals only")
        prev = None
        for lo, hi in sorted(spans, key=lambda s: s[1]):
            if lo != prev:
                raise ValueError("interval pieces must tile the space without gaps")
            prev = hi
        if prev != _top(T):
            raise ValueError("interval pieces must reach the top of the space")
        return
    if isinstance(T, OnePointUnion):
        tails = [p for p in pieces if isinstance(p, TailMembers)]
        if len(tails) != 1:
            raise ValueError("a union must be split into finite member sets plus one tail")
        covered = set()
        for p in pieces:
            if isinstance(p, Members):
                if covered & set(p.indices):
                    raise ValueError("member pieces overlap")
                covered |= set(p.indices)
        if covered != set(range(T.start, tails[0].after + 1)):
            raise ValueError("member pieces must cover every index up to the tail")
        return
    raise ValueError(f"explicit unions are not supported on {format_space(T)}")


# -------------------------------------------------- suprema of sequences


def sup_of_sequence(f: Callable[[int], Ordinal], probe: int = 8) -> Ordinal:
    """Supremum of a strictly increasing ordinal sequence of polynomial shape in n.

    Compares ``f(probe)`` with ``f(probe + 1)``: at the first CNF term where they
    differ, a growing coefficient yields ``w^(e+1)`` and a growing exponent recurses.
    """
    a, b = f(probe), f(probe + 1)
    if not a < b:
        raise ValueError("sequence is not increasing at the probe point")
    prefix = []
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        if (ea, ca) != (eb, cb):
            break
        prefix.append((ea, ca))
    j = len(prefix)
    ea, _ = a.terms[j] if j < len(a.terms) else (None, 0)
    eb, _ = b.terms[j]
    if ea is not None and ea == eb:
        top = omega_pow(eb + 1)
    else:
        top = omega_pow(sup_of_sequence(lambda n: f(n).terms[j][0], probe))
    return Ordinal(prefix) + top


# ------------------------------------------------------------ literals


class _SpaceParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise ValueError(f"{msg} at position {self.pos} in {self.text!r}")

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, token: str):
        if not self.text.startswith(token, self.pos):
            self.error(f"expected {token!r}")
        self.pos += len(token)

    def until_top_level(self, stops: str) -> str:
        depth, start = 0, self.pos
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "(":
                depth += 1
            elif ch == ")":
                if depth == 0:
                    break
                depth -= 1
            elif ch in stops and depth == 0:
                break
            self.pos += 1
        return self.text[start:self.pos].strip()

    def space(self) -> SpaceTerm:
        if self.text.startswith("omega(", self.pos):
            self.pos += len("omega(")
            alpha = parse_ordinal(self.until_top_level(","))
            self.expect(",")
            n = self.until_top_level(")")
            self.expect(")")
            if not n.isdigit():
                self.error("multiplicity must be a natural number")
            return omega_space(alpha, int(n))
        if self.text.startswith("prod(", self.pos):
            self.pos += len("prod(")
            left = _SpaceParser(self.until_top_level(",")).whole()
            self.expect(",")
            right = _SpaceParser(self.until_top_level(")")).whole()
            self.expect(")")
            return marked_product(left, right)
        if self.text.startswith("union(", self.pos):
            self.pos += len("union(")
            template = self.until_top_level(",")
            self.expect(",")
            rest = self.until_top_level(")").replace(" ", "")
            self.expect(")")
            m = re.fullmatch(r"from=(\d+)", rest)
            if not m:
                self.error("expected from=N")
            return template_union(template, int(m.group(1)))
        self.error("expected omega(, prod( or union(")

    def whole(self) -> SpaceTerm:
        E = self.space()
        if self.pos != len(self.text):
            self.error("trailing input")
        return E


def _substitute(template: str, n: int) -> str:
    return re.sub(r"(?<![A-Za-z])n(?![A-Za-z])", str(n), template)


def template_union(template: str, start: int) -> OnePointUnion:
    """Union whose member ``n`` is the space literal ``template`` with ``n`` substituted."""
    member = lambda n: parse_space(_substitute(template, n))
    cb_of = lambda n: cb_rank(member(n))
    probe = start + 8
    if cb_of(probe) == cb_of(probe + 1) == cb_of(probe + 2):
        limit = cb_of(probe)
        settle = start
        while settle < probe and cb_of(settle) != limit:
            settle += 1
        profile = RankProfile("eventually-constant", limit, cb_of, settle)
    else:
        profile = RankProfile("increasing", sup_of_sequence(cb_of, probe), cb_of)
    family = SpaceFamily(f"template:{template}", member, profile)
    return one_point_union(family, start)


def parse_space(text: str) -> SpaceTerm:
    """Parse ``omega(alpha,n)``, ``prod(A,B)`` or ``union(template, from=N)``."""
    return _SpaceParser(text.strip()).whole()


def format_space(E: SpaceTerm) -> str:
    if isinstance(E, OmegaSpace):
        return f"omega({E.alpha},{E.n})"
    if isinstance(E, MarkedProduct):
        return f"prod({format_space(E.left)},{format_space(E.right)})"
    if isinstance(E, OnePointUnion):
        key = E.family.key
        if key.startswith("template:"):
            return f"union({key[len('template:'):]}, from={E.start})"
        return f"union<{key}>(from={E.start})"
    if isinstance(E, ClopenRestrict):
        sel = E.selector
        if isinstance(sel, InitialInterval):
            return f"restrict({format_space(E.parent)},[0,{sel.hi}])"
        return f"restrict({format_space(E.parent)},{{{','.join(map(str, sorted(sel.indices)))}}})"
    raise TypeError(E)


class _PointParser(_SpaceParser):
    def point(self) -> Point:
        if self.text.startswith("o:", self.pos):
            self.pos += 2
            return Ord(parse_ordinal(self.until_top_level(",")))
        if self.text.startswith("inf", self.pos):
            self.pos += 3
            return AtInfinity()
        if self.text.startswith("in(", self.pos):
            self.pos += 3
            idx = self.until_top_level(",")
            self.expect(",")
            inner = _PointParser(self.until_top_level(")")).whole_point()
            self.expect(")")
            if not idx.isdigit():
                self.error("member index must be a natural number")
            return InFamily(int(idx), inner)
        if self.text.startswith("pair(", self.pos):
            self.pos += 5
            left = _PointParser(self.until_top_level(",")).whole_point()
            self.expect(",")
            right = _PointParser(self.until_top_level(")")).whole_point()
            self.expect(")")
            return Pair(left, right)
        self.error("expected o:, inf, in( or pair(")

    def whole_point(self) -> Point:
        x = self.point()
        if self.pos != len(self.text):
            self.error("trailing input")
        return x


def parse_point(text: str) -> Point:
    return _PointParser(text.strip()).whole_point()

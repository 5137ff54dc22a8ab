"""Ordinals below epsilon_0 in Cantor Normal Form.

An :class:`Ordinal` is a tuple of ``(exponent, coefficient)`` pairs with
strictly decreasing exponents, each exponent itself an :class:`Ordinal`.
The empty tuple is zero.  Values are immutable and hashable; the ordinary
comparison operators implement the ordinal order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Optional, Union

__all__ = [
    "Ordinal",
    "OrdinalKind",
    "OrdinalSyntaxError",
    "ZERO",
    "ONE",
    "OMEGA",
    "parse",
    "fmt",
    "compare",
    "add",
    "nat_mul",
    "omega_pow",
    "is_irreducible",
    "classify",
    "fundamental_seq",
    "natural_sum",
    "left_subtract",
    "block_split",
    "ordinal",
]


class OrdinalSyntaxError(ValueError):
    """Malformed ordinal literal; ``pos`` is the 0-based offset of the problem."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


@total_ordering
class Ordinal:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Iterable[tuple["Ordinal", int]] = ()):
        terms = tuple(terms)
        for i, (e, c) in enumerate(terms):
            if not isinstance(e, Ordinal):
                raise TypeError("exponents must be Ordinal")
            if not isinstance(c, int) or c < 1:
                raise ValueError("coefficients must be positive integers")
            if i and not terms[i - 1][0] > e:
                raise ValueError("exponents must be strictly decreasing")
        self.terms = terms
        # finite ordinals compare equal to ints, so they must hash alike
        if not terms:
            self._hash = hash(0)
        elif len(terms) == 1 and not terms[0][0].terms:
            self._hash = hash(terms[0][1])
        else:
            self._hash = hash(terms)

    @classmethod
    def of(cls, n: int) -> "Ordinal":
        if n < 0:
            raise ValueError("negative integer")
        return cls(((ZERO, n),)) if n else ZERO

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Ordinal.of(other) if other >= 0 else None
        return isinstance(other, Ordinal) and self.terms == other.terms

    def __lt__(self, other) -> bool:
        return compare(self, _coerce(other)) < 0

    def __add__(self, other) -> "Ordinal":
        return add(self, _coerce(other))

    def __radd__(self, other) -> "Ordinal":
        return add(_coerce(other), self)

    def __mul__(self, n: int) -> "Ordinal":
        if not isinstance(n, int):
            return NotImplemented
        return nat_mul(self, n) if n else ZERO

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"Ordinal({fmt(self)!r})"

    def __str__(self) -> str:
        return fmt(self)

    # structural helpers

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not self.terms[0][0])

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and bool(self.terms[-1][0])

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0]

    def to_int(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    @property
    def leading_exponent(self) -> "Ordinal":
        if not self.terms:
            raise ValueError("zero has no leading exponent")
        return self.terms[0][0]

    @property
    def leading_coefficient(self) -> int:
        return self.terms[0][1] if self.terms else 0

    @property
    def last_exponent(self) -> "Ordinal":
        """Exponent of the last CNF term (zero for 0); the CB rank of the point."""
        return self.terms[-1][0] if self.terms else ZERO

    def predecessor(self) -> "Ordinal":
        if not self.is_successor:
            raise ValueError(f"{self} is not a successor")
        *head, (e, c) = self.terms
        return Ordinal(head + ([(e, c - 1)] if c > 1 else []))


def _coerce(x: Union[Ordinal, int]) -> Ordinal:
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, int):
        return Ordinal.of(x)
    raise TypeError(f"cannot use {type(x).__name__} as an ordinal")


def ordinal(x: Union[Ordinal, int, str]) -> Ordinal:
    """Coerce an int, literal, or Ordinal to an Ordinal."""
    if isinstance(x, str):
        return parse(x)
    return _coerce(x)


ZERO = Ordinal()
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))


# ---------------------------------------------------------------- order


def compare(a: Ordinal, b: Ordinal) -> int:
    """Return -1, 0 or 1; lexicographic on terms, exponent first."""
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = compare(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    la, lb = len(a.terms), len(b.terms)
    return (la > lb) - (la < lb)


# ------------------------------------------------------------ arithmetic


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    if not b.terms:
        return a
    lead, coeff = b.terms[0]
    kept = [t for t in a.terms if t[0] > lead]
    same = [c for e, c in a.terms if e == lead]
    if same:
        coeff += same[0]
    return Ordinal(kept + [(lead, coeff)] + list(b.terms[1:]))


def nat_mul(a: Ordinal, n: int) -> Ordinal:
    """``a * n`` for a positive integer ``n`` (the n-fold ordinal sum)."""
    if not isinstance(n, int) or n < 1:
        raise ValueError("multiplier must be a positive integer")
    if not a.terms:
        return ZERO
    (e, c), rest = a.terms[0], a.terms[1:]
    return Ordinal(((e, c * n),) + rest)


def omega_pow(b: Ordinal) -> Ordinal:
    return Ordinal(((b, 1),))


def natural_sum(a: Ordinal, b: Ordinal) -> Ordinal:
    """Hessenberg sum: merge the CNF terms of both operands."""
    coeffs: dict[Ordinal, int] = {}
    for e, c in a.terms + b.terms:
        coeffs[e] = coeffs.get(e, 0) + c
    return Ordinal(sorted(coeffs.items(), key=lambda t: t[0], reverse=True))


def left_subtract(a: Ordinal, b: Ordinal) -> Ordinal:
    """The unique ``c`` with ``a + c == b``; requires ``a <= b``."""
    if a > b:
        raise ValueError(f"{a} > {b}")
    i = 0
    while i < len(a.terms) and i < len(b.terms) and a.terms[i] == b.terms[i]:
        i += 1
    if i == len(a.terms):
        return Ordinal(b.terms[i:])
    # first difference: a has a smaller term at position i, absorbed by b's tail
    eb, cb = b.terms[i]
    ea, ca = a.terms[i]
    if ea == eb:
        return Ordinal(((eb, cb - ca),) + b.terms[i + 1:])
    return Ordinal(b.terms[i:])


def block_split(gamma: Ordinal, beta: Ordinal) -> tuple[Optional[int], Ordinal]:
    """Write ``gamma = omega^beta * l + r`` with ``r < omega^beta``.

    Returns ``(l, r)`` when ``gamma < omega^(beta+1)``; otherwise ``(None, rest)``
    where ``rest`` is the part of ``gamma`` below ``omega^beta``.
    """
    high = [t for t in gamma.terms if t[0] > beta]
    at = [c for e, c in gamma.terms if e == beta]
    low = Ordinal(t for t in gamma.terms if t[0] < beta)
    if high:
        return None, low
    return (at[0] if at else 0), low


# ------------------------------------------------------------ structure


def is_irreducible(a: Ordinal) -> bool:
    if a.is_zero:
        raise ValueError("zero is not a candidate for irreducibility")
    return len(a.terms) == 1 and a.terms[0][1] == 1


@dataclass(frozen=True)
class OrdinalKind:
    tag: str  # "Zero" | "Successor" | "Limit"
    predecessor: Optional[Ordinal] = None

    def __str__(self) -> str:
        if self.tag == "Successor":
            return f"Successor({self.predecessor})"
        return self.tag


def classify(a: Ordinal) -> OrdinalKind:
    if a.is_zero:
        return OrdinalKind("Zero")
    if a.is_successor:
        return OrdinalKind("Successor", a.predecessor())
    return OrdinalKind("Limit")


def fundamental_seq(a: Ordinal, i: int) -> Ordinal:
    """Canonical fundamental sequence of a limit ordinal.

    (d + w^(g+1))[i] = d + w^g * i,  (d + w^l)[i] = d + w^(l[i]) for limit l,
    and a last coefficient m > 1 is split off as d + w^b*(m-1) + w^b.
    """
    if not a.is_limit:
        raise ValueError(f"{a} is not a limit ordinal")
    if i < 0:
        raise ValueError("index must be a natural number")
    *head, (e, c) = a.terms
    prefix = Ordinal(head + ([(e, c - 1)] if c > 1 else []))
    if e.is_successor:
        step = nat_mul(omega_pow(e.predecessor()), i) if i else ZERO
    else:
        step = omega_pow(fundamental_seq(e, i))
    return add(prefix, step)


# ------------------------------------------------------- parse / format


def fmt(a: Ordinal) -> str:
    if a.is_zero:
        return "0"
    parts = []
    for e, c in a.terms:
        if e.is_zero:
            parts.append(str(c))
            continue
        if e == ONE:
            base = "w"
        else:
            base = "w^" + _fmt_exponent(e)
        parts.append(base if c == 1 else f"{base}*{c}")
    return "+".join(parts)


def _fmt_exponent(e: Ordinal) -> str:
    if e.is_finite or (len(e.terms) == 1 and e.terms[0][1] == 1):
        return fmt(e)
    return f"({fmt(e)})"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str, pos: Optional[int] = None):
        raise OrdinalSyntaxError(msg, self.text, self.pos if pos is None else pos)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def nat(self) -> int:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected a natural number")
        return int(self.text[start:self.pos])

    def ord(self) -> Ordinal:
        total = self.term()
        while self.peek() == "+":
            self.pos += 1
            total = add(total, self.term())
        return total

    def term(self) -> Ordinal:
        ch = self.peek()
        if ch.isdigit():
            return Ordinal.of(self.nat())
        if ch == "(":
            return self.group()
        if ch != "w":
            self.error("expected 'w', a digit or '('")
        self.pos += 1
        exponent = ONE
        if self.peek() == "^":
            self.pos += 1
            exponent = self.exponent()
        value = omega_pow(exponent)
        if self.peek() == "*":
            self.pos += 1
            at = self.pos
            n = self.nat()
            if n == 0:
                self.error("coefficient 0 is not allowed", at)
            value = nat_mul(value, n)
        return value

    def exponent(self) -> Ordinal:
        ch = self.peek()
        if ch.isdigit():
            return Ordinal.of(self.nat())
        if ch == "(":
            return self.group()
        if ch == "w":
            self.pos += 1
            if self.peek() == "^":
                self.pos += 1
                return omega_pow(self.exponent())
            return OMEGA
        self.error("expected an exponent")

    def group(self) -> Ordinal:
        self.pos += 1
        value = self.ord()
        if self.peek() != ")":
            self.error("expected ')'")
        self.pos += 1
        return value


def parse(text: str) -> Ordinal:
    """Parse an ordinal literal such as ``w^2*3+w+4`` or ``w^(w+1)``."""
    p = _Parser(text.strip())
    if not p.text:
        p.error("empty literal")
    value = p.ord()
    if p.pos != len(p.text):
        p.error(f"unexpected {p.peek()!r}")
    return value

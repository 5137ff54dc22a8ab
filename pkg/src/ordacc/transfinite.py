"""The transfinite sequence ``u_gamma`` of a candidate term, by two independent routes.

* The **oracle** evaluates ``u_l(x)`` for finite stages by the defining
  recursion ``u_{l+1} = lim_k (u_l + tau_k)~``.  The envelope is a maximum over
  the symbolic approach patterns of :func:`~ordacc.candidate.approach`, and the
  limit in ``k`` is read off at a symbolic "large k".  Infinite stages are
  answered only after the whole sequence has stabilized at a finite stage.
* The **profile** engine assembles marked-point values and norms bottom-up in
  closed form, one rule per combinator.

Keeping the two routes apart is the point: tests compare them.
"""

from __future__ import annotations

import os
from collections import OrderedDict
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .candidate import (
    BaseStep,
    EmbedZero,
    HypothesisViolation,
    Img,
    ListFamily,
    MarkedDelay,
    Off,
    OracleUnsupported,
    PowerFamily,
    Product,
    RenormPower,
    Restrict,
    Scale,
    ScaledFamily,
    SequenceFamily,
    Shift,
    Union,
    ZeroTerm,
    _h,
    _power_product,
    approach,
    bound,
    concrete_witnesses,
    fmt_rat,
    is_usc_d,
    marked,
    point_level,
    reps,
    space_of,
)
from .ordinal import ZERO, Ordinal, block_split, fmt, left_subtract, omega_pow, ordinal
from .space import INF_INDEX, Sym, format_point, is_member, rank, rho

__all__ = [
    "Unknown",
    "Budget",
    "BudgetExceeded",
    "NoClosedForm",
    "TransfiniteProfile",
    "Oracle",
    "u_eval",
    "u_norm",
    "alpha0_point",
    "alpha0_global",
    "profile_closed_form",
    "verify_profile",
    "VerificationReport",
    "check_subadditivity",
    "check_pointwise_bound",
    "check_global_bound",
    "full_witnesses",
]


@dataclass(frozen=True)
class Unknown:
    """An undetermined answer; never a guess."""

    reason: str

    def __bool__(self) -> bool:
        raise TypeError("Unknown has no truth value; test with isinstance")


class BudgetExceeded(RuntimeError):
    pass


class NoClosedForm(ValueError):
    """The profile engine has no rule for this term."""


_PROFILES = {
    "fast": dict(max_depth=16, max_evals=200_000),
    "full": dict(max_depth=64, max_evals=2_000_000),
}


@dataclass(frozen=True)
class Budget:
    """Resource limits for the oracle.

    ``max_depth`` caps the finite stage searched for stabilization,
    ``max_evals`` the number of distinct ``(stage, point)`` evaluations, and
    ``timeout_ms`` the wall-clock time (``None`` for no limit).
    """

    max_depth: int = 16
    max_evals: int = 200_000
    timeout_ms: Optional[int] = None

    @classmethod
    def from_env(cls, **overrides) -> "Budget":
        name = os.environ.get("TEL_BUDGET_PROFILE", "fast")
        if name not in _PROFILES:
            raise ValueError(f"TEL_BUDGET_PROFILE must be one of {sorted(_PROFILES)}")
        params = dict(_PROFILES[name])
        params.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**params)


# ------------------------------------------------------------------ oracle


def _host_to_inner(H, x):
    """Oracle coordinates for a user-supplied point of ``H``'s space."""
    if not isinstance(H, EmbedZero) or isinstance(x, (Img, Off)):
        return x
    if not H.image.contains(x):
        return Off(x)
    if H.image.chart is None:
        raise OracleUnsupported(f"no chart for the image [0, {H.image.hi}]")
    return Img(H.image.chart(x.beta))


class Oracle:
    """Pointwise evaluation of finite stages of the transfinite sequence.

    One instance memoizes ``u_l(x)`` for a single term; the memo is keyed by
    ``(l, x)`` and is invisible in the results.
    """

    def __init__(self, H, budget: Optional[Budget] = None):
        if not is_usc_d(H):
            raise ValueError("the transfinite sequence is defined here for u.s.c.d. terms only")
        self.H = H
        self.budget = budget or Budget()
        self.memo: dict = {}
        self.evals = 0
        self.started = time.monotonic()
        self._stable: Optional[int] = None
        self._stable_done = False
        self.exhausted = False

    def restart(self) -> None:
        """Reset the evaluation count and clock; memoized values are kept."""
        self.evals = 0
        self.started = time.monotonic()

    def _tick(self) -> None:
        self.evals += 1
        if self.evals > self.budget.max_evals:
            self.exhausted = True
            raise BudgetExceeded(f"more than {self.budget.max_evals} evaluations")
        if self.budget.timeout_ms is not None and self.evals % 256 == 0:
            if (time.monotonic() - self.started) * 1000 > self.budget.timeout_ms:
                self.exhausted = True
                raise BudgetExceeded(f"timeout after {self.budget.timeout_ms} ms")

    def tau(self, k, y) -> Fraction:
        return _h(self.H, INF_INDEX, y) - _h(self.H, k, y)

    def u(self, ell: int, x) -> Fraction:
        """``u_ell(x)`` for a finite stage ``ell``; ``x`` may be symbolic."""
        if ell == 0:
            return Fraction(0)
        key = (ell, x)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self._tick()
        L = point_level(x)
        K = Sym(L, "K")
        best = self.u(ell - 1, x) + self.tau(K, x)
        for y in approach(self.H, x, L):
            best = max(best, self.u(ell - 1, y) + self.tau(K, y))
        self.memo[key] = best
        return best

    def stable_stage(self) -> Optional[int]:
        """Least finite ``l`` with ``u_l == u_{l+1}`` everywhere, or ``None`` within the budget.

        Checked on the level-0 representatives, which cover every value pattern.
        """
        if not self._stable_done:
            pts = reps(self.H, 0)
            for ell in range(self.budget.max_depth + 1):
                if all(self.u(ell, x) == self.u(ell + 1, x) for x in pts):
                    self._stable = ell
                    break
            self._stable_done = True
        return self._stable

    def at(self, gamma: Ordinal, x) -> Fraction:
        """``u_gamma(x)``; raises ``BudgetExceeded`` when an infinite stage cannot be reached."""
        gamma = ordinal(gamma)
        if gamma.is_finite:
            return self.u(gamma.to_int(), x)
        ell = self.stable_stage()
        if ell is None:
            raise BudgetExceeded(f"no finite stabilization within {self.budget.max_depth} stages")
        return self.u(ell, x)

    def norm(self, gamma: Ordinal) -> Fraction:
        return max(self.at(gamma, x) for x in reps(self.H, 0))

    def alpha0_at(self, x) -> Ordinal:
        ell = self.stable_stage()
        if ell is None:
            raise BudgetExceeded(f"no finite stabilization within {self.budget.max_depth} stages")
        final = self.u(ell, x)
        first = next(i for i in range(ell + 1) if self.u(i, x) == final)
        return Ordinal.of(first)


def full_witnesses(H) -> tuple:
    """The symbolic representative set covering every value pattern of ``H``."""
    return reps(H, 0)


# ------------------------------------------------------------------ profile


@dataclass
class TransfiniteProfile:
    """Closed-form summary of ``u_gamma`` at the marked point and in norm.

    ``jumps`` lists the ordinals where the marked-point value increases, with
    the new value.  ``norm`` is exact at every ordinal.  ``breakpoints`` pairs
    each jump (and ``alpha0``) with both values.
    """

    jumps: tuple
    norm: Callable[[Ordinal], Fraction] = field(repr=False)
    alpha0: Ordinal
    alpha0_marked: Ordinal

    def at_marked(self, gamma) -> Fraction:
        gamma = ordinal(gamma)
        value = Fraction(0)
        for g, v in self.jumps:
            if g <= gamma:
                value = v
        return value

    @property
    def bound(self) -> Fraction:
        return self.norm(self.alpha0)

    @property
    def breakpoints(self) -> list:
        gammas = sorted({g for g, _ in self.jumps} | ({self.alpha0} if self.alpha0 else set()))
        return [(g, self.norm(g), self.at_marked(g)) for g in gammas]

    def to_json(self) -> dict:
        return {
            "alpha0": fmt(self.alpha0),
            "bound": fmt_rat(self.bound),
            "breakpoints": [
                {"at_marked": fmt_rat(m), "gamma": fmt(g), "norm": fmt_rat(n)} for g, n, m in self.breakpoints
            ],
        }

    def check_invariants(self) -> None:
        prev_n = prev_m = Fraction(-1)
        for g, n, m in self.breakpoints:
            if not (m <= n <= self.bound):
                raise AssertionError(f"at {g}: at_marked {m}, norm {n}, bound {self.bound}")
            if n < prev_n or m < prev_m:
                raise AssertionError(f"profile decreases at {g}")
            prev_n, prev_m = n, m


def _zero_profile() -> TransfiniteProfile:
    return TransfiniteProfile((), lambda g: Fraction(0), ZERO, ZERO)


def _cache(fn):
    memo: dict = {}

    def wrapped(H):
        if H not in memo:
            memo[H] = fn(H)
        return memo[H]

    wrapped.cache = memo
    return wrapped


@_cache
def profile_closed_form(H) -> TransfiniteProfile:
    """Assemble the profile bottom-up; raises ``HypothesisViolation`` or ``NoClosedForm``."""
    if isinstance(H, BaseStep):
        a = H.a
        return TransfiniteProfile(((Ordinal.of(1), a),), lambda g: a if g >= 1 else Fraction(0),
                                  Ordinal.of(1), Ordinal.of(1))
    if isinstance(H, ZeroTerm):
        return _zero_profile()
    if isinstance(H, Scale):
        P = profile_closed_form(H.inner)
        c = H.c
        if c == 0:
            return _zero_profile()
        return TransfiniteProfile(tuple((g, c * v) for g, v in P.jumps), lambda g: c * P.norm(g),
                                  P.alpha0, P.alpha0_marked)
    if isinstance(H, (Shift, EmbedZero)):
        return profile_closed_form(H.inner)
    if isinstance(H, RenormPower):
        return profile_closed_form(Scale(_power_product(H.F, H.p), Fraction(1, H.p)))
    if isinstance(H, Product):
        return _product_profile(profile_closed_form(H.F), profile_closed_form(H.G))
    if isinstance(H, Union):
        return _union_profile(H)
    if isinstance(H, MarkedDelay):
        return _delay_profile(H)
    if isinstance(H, Restrict):
        raise NoClosedForm("restrictions are evaluated by the oracle only")
    raise TypeError(H)


def _product_profile(F: TransfiniteProfile, G: TransfiniteProfile) -> TransfiniteProfile:
    """The product rule along the slice through the right factor's marked point.

    Between consecutive jumps ``(g_{i-1}, c_{i-1})`` and ``(g_i, c_i)`` of the
    right factor the slice carries ``c_{i-1}`` plus the left factor's values,
    restarted at ``g_{i-1}``; at ``g_i`` it resets to ``c_i``.  This needs
    ``c_{i-1} + ||u^F_Delta|| <= c_i`` where ``g_{i-1} + Delta = g_i``.
    """
    marks = [(ZERO, Fraction(0))] + list(G.jumps)
    for (g0, c0), (g1, c1) in zip(marks, marks[1:]):
        delta = left_subtract(g0, g1)
        if c0 + F.norm(delta) > c1:
            raise HypothesisViolation(
                "product lemma",
                f"{fmt_rat(c0)} + ||u_{fmt(delta)}|| = {fmt_rat(c0 + F.norm(delta))} exceeds {fmt_rat(c1)} "
                f"at the jump {fmt(g1)} of the right factor",
            )
    jumps: list = []
    for i, (g0, c0) in enumerate(marks):
        nxt = marks[i + 1][0] if i + 1 < len(marks) else None
        jumps.append((g0, c0))
        for d, f in F.jumps:
            at = g0 + d
            if nxt is not None and not at < nxt:
                break
            jumps.append((at, c0 + f))
    clean: list = []
    for g, v in jumps:
        if v > (clean[-1][1] if clean else Fraction(0)):
            clean.append((g, v))

    def block(gamma):
        g0, c0 = marks[0]
        for g, c in marks:
            if g <= gamma:
                g0, c0 = g, c
        return g0, c0

    def norm(gamma):
        gamma = ordinal(gamma)
        g0, c0 = block(gamma)
        return max(G.norm(gamma), c0 + F.norm(left_subtract(g0, gamma)))

    last_g = marks[-1][0]
    a0_marked = clean[-1][0] if clean else ZERO
    a0 = max(a0_marked, G.alpha0, (last_g + F.alpha0) if F.alpha0 else ZERO)
    return TransfiniteProfile(tuple(clean), norm, a0, a0_marked)


def _union_profile(U: Union) -> TransfiniteProfile:
    fam, start = U.family, U.start
    limit = fam.norm_profile().limit
    if limit != 0:
        raise HypothesisViolation("disjoint-union lemma", f"member norms tend to {fmt_rat(limit)}, not 0")
    if isinstance(fam, ScaledFamily):
        P = profile_closed_form(fam.base)
        top = fam.scale.sup_from(start)
        if top == 0:
            return _zero_profile()
        # the marked value is the limsup of member norms, which is 0 here
        return TransfiniteProfile((), lambda g: top * P.norm(g), P.alpha0, ZERO)
    if isinstance(fam, ListFamily):
        members = list(fam.prefix) + [fam.tail]
        profs = [profile_closed_form(m) for m in members]
        return TransfiniteProfile(
            (), lambda g: max(P.norm(g) for P in profs), max(P.alpha0 for P in profs), ZERO
        )
    if isinstance(fam, PowerFamily):
        return _power_union_profile(U)
    if isinstance(fam, SequenceFamily):
        return _sequence_union_profile(U)
    raise TypeError(fam)


def _single_jump(P: TransfiniteProfile, what: str) -> tuple:
    if len(P.jumps) != 1:
        raise HypothesisViolation(what, "the base must jump exactly once at its marked point")
    (alpha, t), = P.jumps
    if len(alpha.terms) != 1 or alpha.terms[0][1] != 1:
        raise HypothesisViolation(what, f"the jump ordinal {fmt(alpha)} must be irreducible")
    if P.bound != t:
        raise HypothesisViolation(what, f"the base norm {fmt_rat(P.bound)} exceeds its marked value {fmt_rat(t)}")
    return alpha, t


def _power_union_profile(U: Union) -> TransfiniteProfile:
    """Union of ``c(n)`` times the renormalized ``n``-th powers of a single-jump base.

    With the base jumping to ``t`` at ``alpha``, member ``n`` has norm
    ``c(n) (l t + ||u^G_r||) / n`` at ``gamma = alpha l + r`` when ``n > l`` and
    ``c(n) t`` otherwise, so the marked value jumps once, at ``alpha * w``.
    """
    fam, start = U.family, U.start
    G = profile_closed_form(fam.base)
    alpha, t = _single_jump(G, "powers lemma")
    beta = alpha.leading_exponent
    top = omega_pow(beta + 1)
    c = fam.scale
    c_inf = c.limit

    def norm(gamma):
        gamma = ordinal(gamma)
        if gamma >= top:
            return max(c_inf * t, c.sup_from(start) * t)
        ell, r = block_split(gamma, beta)
        mass = ell * t + G.norm(r)
        best = max((c.value(n) * t for n in range(start, ell + 1)), default=Fraction(0))
        n = max(start, ell + 1)
        while mass and c.sup_from(n) * mass / n > best:
            best = max(best, c.value(n) * mass / n)
            n += 1
        return best

    jumps = ((top, c_inf * t),) if c_inf * t else ()
    return TransfiniteProfile(jumps, norm, top, top if jumps else ZERO)


def _sequence_union_profile(U: Union) -> TransfiniteProfile:
    """Union over a fundamental sequence: member ``n`` jumps to ``top(n)`` at ``period(n)``.

    The members' norms stay below ``eps(n)`` up to ``delta(n)``, and the periods
    increase to ``limit``; so the marked value jumps once, at ``limit``, to the
    limit of the member tops.
    """
    fam, start = U.family, U.start
    meta = fam.meta
    lam, a = meta["limit"], meta["top"]
    period, top_of, eps, delta = meta["period"], meta["top_of"], meta["eps"], meta["delta"]
    for n in range(start, start + 2):
        P = profile_closed_form(fam.member(n))
        if P.jumps != ((period(n), top_of(n)),):
            raise HypothesisViolation("limit case", f"member {n} does not jump once to {fmt_rat(top_of(n))}")
        if P.norm(delta(n)) > eps(n):
            raise HypothesisViolation("limit case", f"member {n} exceeds its budget {fmt_rat(eps(n))}")

    def norm(gamma):
        gamma = ordinal(gamma)
        if gamma >= lam:
            return a
        if gamma.is_zero:
            return Fraction(0)
        best, n = Fraction(0), start
        while True:
            if delta(n) >= gamma and eps(n) <= best:
                return best
            best = max(best, profile_closed_form(fam.member(n)).norm(gamma))
            n += 1

    return TransfiniteProfile(((lam, a),), norm, lam, lam)


def _delay_profile(H: MarkedDelay) -> TransfiniteProfile:
    """Delayed marked points: ``c`` on ``[1, alpha)``, ``b`` at ``alpha``, ``b + c`` from ``alpha + 1``."""
    if not isinstance(H.union.family, (PowerFamily, SequenceFamily)):
        raise NoClosedForm("delays are given in closed form over power or sequence families")
    P = profile_closed_form(H.union)
    if len(P.jumps) != 1:
        raise HypothesisViolation("marked delay", "the union must jump exactly once")
    (alpha, b), = P.jumps
    c = H.c
    if c > b:
        raise HypothesisViolation("marked delay", f"c = {fmt_rat(c)} exceeds the jump value {fmt_rat(b)}")
    if not alpha.is_limit:
        raise HypothesisViolation("marked delay", "the jump must sit at a limit ordinal")
    one = Ordinal.of(1)
    jumps = [(one, c)] + ([(alpha, b)] if b > c else []) + [(alpha + 1, b + c)]
    prof = TransfiniteProfile(tuple(jumps), lambda g: Fraction(0), alpha + 1, alpha + 1)
    prof.norm = lambda g: max(prof.at_marked(g), P.norm(g))
    return prof


# ------------------------------------------------------------ public API


_ORACLES: "OrderedDict[tuple, Oracle]" = OrderedDict()
_ORACLE_CACHE_SIZE = 64


def _oracle_for(H, budget) -> Oracle:
    """A memoizing oracle for ``H``, shared between calls with the same budget.

    Each call gets a fresh evaluation count and clock, so a budget limits one
    public call rather than the lifetime of the cache.
    """
    budget = budget or Budget.from_env()
    key = (H, budget)
    O = _ORACLES.get(key)
    # an exhausted oracle holds a partial memo; reusing it would make results depend on call history
    if O is None or O.exhausted:
        O = Oracle(H, budget)
        _ORACLES[key] = O
        if len(_ORACLES) > _ORACLE_CACHE_SIZE:
            _ORACLES.popitem(last=False)
    else:
        _ORACLES.move_to_end(key)
        O.restart()
    return O


def u_eval(H, gamma, x, budget: Optional[Budget] = None, method: str = "auto"):
    """``u_gamma(x)`` exactly, or :class:`Unknown`.

    ``method="oracle"`` uses the pointwise recursion only.  ``"auto"`` falls
    back to the closed-form profile at the marked point when the oracle has no
    finite representation of the term.
    """
    gamma = ordinal(gamma)
    if gamma.is_zero:
        return Fraction(0)
    if method not in ("auto", "oracle", "profile"):
        raise ValueError(f"unknown method {method!r}")
    host_marked = x == marked(H)
    if method != "profile":
        try:
            O = _oracle_for(H, budget)
            return O.at(gamma, _host_to_inner(H, x))
        except BudgetExceeded as e:
            failure = Unknown(f"budget: {e}")
        except OracleUnsupported as e:
            failure = Unknown(f"oracle: {e}")
        if method == "oracle":
            return failure
    if host_marked:
        try:
            return profile_closed_form(H).at_marked(gamma)
        except (NoClosedForm, HypothesisViolation) as e:
            return Unknown(f"profile: {e}")
    return Unknown("no closed form away from the marked point") if method == "profile" else failure


def u_norm(H, gamma, budget: Optional[Budget] = None, method: str = "auto"):
    """``||u_gamma||``; the profile when available, else the oracle over the full witness set."""
    gamma = ordinal(gamma)
    if method in ("auto", "profile"):
        try:
            return profile_closed_form(H).norm(gamma)
        except NoClosedForm as e:
            if method == "profile":
                return Unknown(str(e))
    try:
        return _oracle_for(H, budget).norm(gamma)
    except (BudgetExceeded, OracleUnsupported) as e:
        return Unknown(str(e))


def alpha0_point(H, x, budget: Optional[Budget] = None):
    """Pointwise order of accumulation at ``x``."""
    try:
        return _oracle_for(H, budget).alpha0_at(_host_to_inner(H, x))
    except (BudgetExceeded, OracleUnsupported) as e:
        if x == marked(H):
            try:
                return profile_closed_form(H).alpha0_marked
            except NoClosedForm:
                pass
        return Unknown(str(e))


def alpha0_global(H, budget: Optional[Budget] = None, method: str = "auto"):
    """Order of accumulation: the profile's when available, else the oracle's stabilization stage."""
    if method in ("auto", "profile"):
        try:
            return profile_closed_form(H).alpha0
        except NoClosedForm as e:
            if method == "profile":
                return Unknown(str(e))
    try:
        ell = _oracle_for(H, budget).stable_stage()
    except (BudgetExceeded, OracleUnsupported) as e:
        return Unknown(str(e))
    return Unknown("no stabilization within the budget") if ell is None else Ordinal.of(ell)


# ------------------------------------------------------------ verification


@dataclass
class VerificationReport:
    rows: list  # dicts: gamma, what, point, oracle, profile, ok
    ok: bool

    def mismatches(self) -> list:
        return [r for r in self.rows if not r["ok"]]

    def to_json(self) -> dict:
        return {"ok": self.ok, "rows": self.rows}


def _stages(P: TransfiniteProfile) -> list:
    """Breakpoints plus the stage just below each successor breakpoint, and 0."""
    out = {ZERO}
    for g, _, _ in P.breakpoints:
        out.add(g)
        if g.is_successor:
            out.add(g.predecessor())
    out.add(P.alpha0 + 1)
    return sorted(out)


def verify_profile(H, P: TransfiniteProfile, witnesses=None, budget: Optional[Budget] = None) -> VerificationReport:
    """Compare a profile with the oracle.

    At every stage: the marked value must agree, the norm (taken over the full
    witness set) must agree, and each extra witness must stay within the norm.
    The profile's ``alpha0`` must equal the oracle's stabilization stage.
    """
    O = _oracle_for(H, budget)
    rows: list = []
    m = _host_to_inner(H, marked(H))
    pts = list(witnesses) if witnesses is not None else []

    def row(gamma, what, point, oracle, profile, ok):
        rows.append(dict(gamma=fmt(gamma), what=what, point=point, oracle=oracle, profile=profile, ok=ok))

    try:
        for gamma in _stages(P):
            got = O.at(gamma, m)
            row(gamma, "at_marked", "marked", fmt_rat(got), fmt_rat(P.at_marked(gamma)), got == P.at_marked(gamma))
            n = O.norm(gamma)
            row(gamma, "norm", "all", fmt_rat(n), fmt_rat(P.norm(gamma)), n == P.norm(gamma))
            for x in pts:
                v = O.at(gamma, _host_to_inner(H, x))
                row(gamma, "bounded", _fmt_any(x), fmt_rat(v), fmt_rat(P.norm(gamma)), v <= P.norm(gamma))
        ell = O.stable_stage()
        a0 = Ordinal.of(ell) if ell is not None else None
        row(P.alpha0, "alpha0", "all", fmt(a0) if a0 is not None else "unknown", fmt(P.alpha0), a0 == P.alpha0)
    except (BudgetExceeded, OracleUnsupported) as e:
        rows.append(dict(gamma="", what="unknown", point="", oracle=str(e), profile="", ok=False))
    return VerificationReport(rows, all(r["ok"] for r in rows))


def _fmt_any(x) -> str:
    if isinstance(x, Img):
        return f"img({_fmt_any(x.inner)})"
    if isinstance(x, Off):
        return f"off({_fmt_any(x.point)})"
    return format_point(x)


def check_subadditivity(H, alpha, beta, witnesses=None, budget: Optional[Budget] = None):
    """``u_{alpha+beta} <= u_alpha + u_beta`` at every witness (default: the full set)."""
    alpha, beta = ordinal(alpha), ordinal(beta)
    O = _oracle_for(H, budget)
    pts = witnesses if witnesses is not None else reps(H, 0)
    try:
        return all(O.at(alpha + beta, x) <= O.at(alpha, x) + O.at(beta, x) for x in pts)
    except (BudgetExceeded, OracleUnsupported) as e:
        return Unknown(str(e))


def _point_rank(H, x) -> Ordinal:
    if isinstance(x, Img):
        return rank(space_of(H.inner), x.inner)
    if isinstance(x, Off):
        return rank(space_of(H), x.point)
    return rank(space_of(H), x)


def check_pointwise_bound(H, x, budget: Optional[Budget] = None):
    """``alpha0(x) <= r(x)``, or ``r(x) + 1`` when the rank is infinite."""
    a0 = alpha0_point(H, x, budget)
    if isinstance(a0, Unknown):
        return a0
    r = _point_rank(H, _host_to_inner(H, x) if isinstance(H, EmbedZero) else x)
    return a0 <= (r if r.is_finite else r + 1)


def check_global_bound(H, budget: Optional[Budget] = None, method: str = "auto"):
    """``alpha0(H) <= rho(E)``."""
    a0 = alpha0_global(H, budget, method)
    if isinstance(a0, Unknown):
        return a0
    return a0 <= rho(space_of(H))

import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ordacc.ordinal import Ordinal

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=300)
settings.load_profile(os.environ.get("ORDACC_HYPOTHESIS", "default"))


def _cnf(exponents):
    return st.lists(
        st.tuples(exponents, st.integers(1, 5)), min_size=0, max_size=4
    ).map(_normalize)


def _normalize(pairs):
    merged = {}
    for e, c in pairs:
        merged[e] = merged.get(e, 0) + c
    return Ordinal(sorted(merged.items(), key=lambda t: t[0], reverse=True))


small_exponents = st.integers(0, 3).map(Ordinal.of)
# exponents that are themselves below w^w, so the strategy reaches w^w and w^(w+1)
nested_exponents = st.one_of(small_exponents, _cnf(small_exponents))
ordinals = _cnf(nested_exponents)
finite_exponent_ordinals = _cnf(small_exponents)
limit_ordinals = ordinals.filter(lambda a: a.is_limit)


# ------------------------------------------------------------ candidate terms

LEAVES = [
    "base(1)",
    "base(1/2)",
    "base(2)",
    "union(base(1),from=1,c=1/n)",
    "union(base(1/2),from=2,c=1/(n+1))",
]


def term_literals(depth: int):
    """Literals of combinator terms of nesting depth at most ``depth``."""
    leaf = st.sampled_from(LEAVES)
    if depth == 0:
        return leaf
    sub = term_literals(depth - 1)
    return st.one_of(
        leaf,
        st.builds(lambda t, c: f"scale({t},{c})", sub, st.sampled_from(["1/2", "2", "3/4"])),
        st.builds(lambda t, s: f"shift({t},{s})", sub, st.integers(1, 3)),
        st.builds(lambda f, g: f"prod({f},{g})", sub, sub),
        st.builds(lambda t: f"power({t},2)", sub),
    )


def nesting_depth(text: str) -> int:
    depth = best = 0
    for ch in text:
        if ch == "(":
            depth += 1
            best = max(best, depth)
        elif ch == ")":
            depth -= 1
    return best


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])

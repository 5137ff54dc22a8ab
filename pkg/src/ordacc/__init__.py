"""Exact transfinite sequences and orders of accumulation for candidate sequences."""

from .ordinal import OMEGA, ONE, ZERO, Ordinal, fmt, ordinal
from .candidate import HypothesisViolation, marked, parse_term
from .realize import realize, realize_in_space, realize_irreducible, realize_successor_plus
from .transfinite import Budget, Unknown, alpha0_global, profile_closed_form, u_eval, u_norm, verify_profile

__all__ = [
    "Ordinal",
    "ZERO",
    "ONE",
    "OMEGA",
    "ordinal",
    "fmt",
    "HypothesisViolation",
    "marked",
    "parse_term",
    "realize",
    "realize_irreducible",
    "realize_successor_plus",
    "realize_in_space",
    "Budget",
    "Unknown",
    "u_eval",
    "u_norm",
    "alpha0_global",
    "profile_closed_form",
    "verify_profile",
]

"""Command-line front end.

Every subcommand builds a report ``{"schema", "command", "status", "results"}``
and prints it as canonical JSON (sorted keys) or, for u-tables, as TSV.  Exit
codes: 0 ok, 2 usage or malformed input, 3 hypothesis violation, 4 budget
exhausted or undetermined value.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from fractions import Fraction
from typing import Optional

from .candidate import (
    HypothesisViolation,
    ListFamily,
    OracleUnsupported,
    ScaledFamily,
    Union,
    _power_product,
    base_step,
    concrete_witnesses,
    fmt_rat,
    format_term,
    marked,
    parse_rational_fn,
    parse_term,
    rat,
    term_to_json,
    union,
)
from .ordinal import OrdinalSyntaxError, classify, fmt, fundamental_seq, is_irreducible, nat_mul, natural_sum, ordinal
from .realize import realize, realize_in_space, realize_successor_plus, select_weights
from .simplex import example_3_28, s_of_k_probe
from .space import canonical_class, cb_rank, format_point, parse_point, parse_space, rank, rho, top_rank_count
from .transfinite import (
    Budget,
    NoClosedForm,
    Unknown,
    alpha0_point,
    profile_closed_form,
    u_eval,
    u_norm,
    verify_profile,
)

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_BUDGET = 0, 2, 3, 4

__all__ = ["main", "dispatch", "serialize", "build_parser", "RunReport"]


class _Undetermined(RuntimeError):
    pass


class RunReport(dict):
    """Plain dict with a fixed key set; ``exit_code`` follows the status."""

    @property
    def exit_code(self) -> int:
        return {"ok": EXIT_OK, "hypothesis-violation": EXIT_HYPOTHESIS, "budget-exceeded": EXIT_BUDGET}[
            self["status"]
        ]


def _q(v) -> str:
    if isinstance(v, Unknown):
        raise _Undetermined(v.reason)
    return fmt_rat(v)


def _o(v) -> str:
    if isinstance(v, Unknown):
        raise _Undetermined(v.reason)
    return fmt(v)


def _budget(args) -> Budget:
    return Budget.from_env(max_depth=args.max_depth, timeout_ms=args.timeout_ms)


def _gammas(text: Optional[str]) -> list:
    if text is None or not text.strip():
        return []
    return [ordinal(t.strip()) for t in text.split(",")]


# ------------------------------------------------------------ subcommands


def cmd_ordinal(args) -> dict:
    a = ordinal(args.expr)
    out = {
        "value": fmt(a),
        "kind": str(classify(a)),
        "irreducible": is_irreducible(a),
        "cnf": [{"exponent": fmt(e), "coefficient": c} for e, c in a.terms],
    }
    if args.plus is not None:
        out["plus"] = fmt(a + ordinal(args.plus))
    if args.natural_sum is not None:
        out["natural_sum"] = fmt(natural_sum(a, ordinal(args.natural_sum)))
    if args.times is not None:
        out["times"] = fmt(nat_mul(a, args.times))
    if args.fundamental is not None:
        out["fundamental"] = [fmt(fundamental_seq(a, i)) for i in range(args.fundamental)]
    return out


def cmd_rank(args) -> dict:
    E = parse_space(args.space)
    cls, count = canonical_class(E)
    out = {
        "cb_rank": fmt(cb_rank(E)),
        "top_count": top_rank_count(E),
        "rho": fmt(rho(E)),
        "canonical_class": {"rank": fmt(cls), "count": count},
    }
    if args.point is not None:
        x = parse_point(args.point)
        out["point"] = {"point": format_point(x), "rank": fmt(rank(E, x))}
    return out


def _realized(args):
    a = rat(args.a)
    if args.in_space is not None:
        return realize_in_space(parse_space(args.in_space), ordinal(args.alpha), a)
    if args.plus:
        return realize_successor_plus(ordinal(args.alpha), a)
    return realize(ordinal(args.alpha), a)


def cmd_realize(args) -> dict:
    H, P = _realized(args)
    out = {"profile": P.to_json(), "term": format_term(H)}
    if args.in_space is None and not args.plus:
        out["weights"] = [fmt_rat(w) for w in select_weights(ordinal(args.alpha), rat(args.a))]
    if args.tree:
        out["tree"] = term_to_json(H)
    return out


def _term_from(args):
    if args.sequence is not None:
        return parse_term(args.sequence)
    if args.alpha is not None:
        return _realized(args)[0]
    raise ValueError("give --sequence or --alpha")


def _utable_rows(H, gammas, budget, use_oracle: bool) -> list:
    m = marked(H)
    rows = []
    for g in gammas:
        if use_oracle:
            norm, at = u_norm(H, g, budget, method="oracle"), u_eval(H, g, m, budget, method="oracle")
        else:
            norm, at = u_norm(H, g, budget), u_eval(H, g, m, budget)
        rows.append({"gamma": fmt(g), "norm": _q(norm), "at_marked": _q(at)})
    return rows


def _default_gammas(H) -> list:
    try:
        P = profile_closed_form(H)
    except (NoClosedForm, HypothesisViolation):
        return [ordinal(i) for i in range(4)]
    out = {ordinal(0), P.alpha0 + 1}
    for g, _, _ in P.breakpoints:
        out.add(g)
        if g.is_successor:
            out.add(g.predecessor())
    return sorted(out)


def cmd_utable(args) -> dict:
    H = _term_from(args)
    gammas = _gammas(args.gammas) if args.gammas is not None else _default_gammas(H)
    return {"rows": _utable_rows(H, gammas, _budget(args), args.oracle), "term": format_term(H)}


def _limit_witnesses(H, args) -> list:
    pts = concrete_witnesses(H)
    return pts[: args.max_witnesses] if args.max_witnesses is not None else pts


def _verify_term(H, args) -> dict:
    P = profile_closed_form(H)
    report = verify_profile(H, P, _limit_witnesses(H, args), _budget(args))
    return {"ok": report.ok, "profile": P.to_json(), "rows": report.rows, "term": format_term(H)}


def _lemma_powers(args) -> dict:
    """Plain ``p``-fold powers of a base step: ``u_g(0^p) = l a`` on ``[l, l+1)``, ``alpha0 = p``."""
    a, p = rat(args.a), args.p
    H = _power_product(base_step(a), p)
    budget = _budget(args)
    m = marked(H)
    rows = []
    for ell in range(p + 2):
        want = min(ell, p) * a
        got = u_eval(H, ell, m, budget, method="oracle")
        rows.append({"check": "at_marked", "gamma": str(ell), "expected": fmt_rat(want), "oracle": _q(got),
                     "ok": got == want})
        norm = u_norm(H, ell, budget, method="oracle")
        rows.append({"check": "norm<=p*a", "gamma": str(ell), "expected": fmt_rat(p * a), "oracle": _q(norm),
                     "ok": norm <= p * a})
    a0 = alpha0_point(H, m, budget)
    rows.append({"check": "alpha0_marked", "gamma": "", "expected": str(p), "oracle": _o(a0), "ok": a0 == p})
    inner = _verify_term(H, args)
    return {"ok": all(r["ok"] for r in rows) and inner["ok"], "lemma_rows": rows, "profile_check": inner}


def _lemma_union(args) -> dict:
    """Marked value is the limsup of member norms; the norm is their sup."""
    if args.sequence is not None:
        H = parse_term(args.sequence)
        if not isinstance(H, Union):
            raise ValueError("--sequence must be a union term for this lemma")
    else:
        H = union(ScaledFamily(base_step(1), parse_rational_fn("1/n")), 1)
    fam, start = H.family, H.start
    if not isinstance(fam, (ScaledFamily, ListFamily)):
        raise OracleUnsupported("the member-wise check needs finitely many member shapes")
    budget = _budget(args)
    count = args.members
    rows = []
    for g in range(args.max_gamma + 1):
        members = [u_norm(fam.member(n), g, budget, method="oracle") for n in range(start, start + count)]
        for v in members:
            _q(v)
        # u_g <= g * sup h, so members past the window cannot raise the sup
        tail_u = fam.norm_profile().sup_from(start + count) * g
        sup_members = max(members)
        if tail_u > sup_members:
            raise _Undetermined(f"members beyond {start + count - 1} may matter; raise --members")
        got_norm = u_norm(H, g, budget, method="oracle")
        ok_norm = got_norm == sup_members
        rows.append({"check": "norm=sup", "gamma": str(g), "expected": fmt_rat(sup_members), "oracle": _q(got_norm),
                     "ok": ok_norm})
        # u_g <= g * sup h and member h-norms tend to 0, so the limsup vanishes
        limsup = Fraction(0)
        got_m = u_eval(H, g, marked(H), budget, method="oracle")
        rows.append({"check": "marked=limsup", "gamma": str(g), "expected": fmt_rat(limsup), "oracle": _q(got_m),
                     "ok": got_m == limsup})
    return {"ok": all(r["ok"] for r in rows), "lemma_rows": rows, "term": format_term(H)}


def cmd_verify(args) -> dict:
    if args.lemma == "powers":
        return _lemma_powers(args)
    if args.lemma == "disjoint-union":
        return _lemma_union(args)
    H = _term_from(args)
    return _verify_term(H, args)


def cmd_simplex(args) -> dict:
    if args.action == "demo-3-28":
        r = example_3_28(_budget(args))
        return {
            "alpha0_full": _o(r["alpha0_full"]),
            "alpha0_restricted": _o(r["alpha0_restricted"]),
            "probes": r["probes"],
            "u1_equals_u2_on_K": r["u1_equals_u2_on_K"],
            "u_full": r["u_full"],
            "u_restricted": r["u_restricted"],
        }
    E = parse_space(args.space)
    rows = s_of_k_probe(E, _gammas(args.gammas), rat(args.a))
    return {"results": [{"gamma": fmt(g), "realized": ok} for g, ok in rows], "rho": fmt(rho(E))}


# ------------------------------------------------------------ plumbing


def _budget_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-depth", type=int, default=None, help="largest finite stage searched for stabilization")
    p.add_argument("--max-witnesses", type=int, default=None, help="cap on concrete witness points")
    p.add_argument("--timeout-ms", type=int, default=None, help="wall-clock limit for oracle evaluation")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--timing", action="store_true", help="include elapsed milliseconds (breaks byte-identity)")


def _term_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sequence", default=None, help="candidate-term literal")
    p.add_argument("--alpha", default=None, help="ordinal literal, realized with --a")
    p.add_argument("--a", default="1")
    p.add_argument("--plus", action="store_true", help="use the alpha+1 construction")
    p.add_argument("--in-space", default=None, help="host space literal")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ordacc", description="Transfinite sequences and orders of accumulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ordinal", help="normalize and inspect an ordinal literal")
    p.add_argument("expr")
    p.add_argument("--plus", default=None)
    p.add_argument("--natural-sum", default=None)
    p.add_argument("--times", type=int, default=None)
    p.add_argument("--fundamental", type=int, default=None, metavar="N", help="first N terms")
    _budget_flags(p)

    p = sub.add_parser("rank", help="Cantor-Bendixson data of a space")
    p.add_argument("--space", required=True)
    p.add_argument("--point", default=None)
    _budget_flags(p)

    p = sub.add_parser("realize", help="build a realization and print its profile")
    p.add_argument("--alpha", required=True)
    p.add_argument("--a", default="1")
    p.add_argument("--plus", action="store_true")
    p.add_argument("--in-space", default=None)
    p.add_argument("--tree", action="store_true", help="include the JSON node tree")
    _budget_flags(p)

    p = sub.add_parser("utable", help="norm and marked value at chosen stages")
    _term_flags(p)
    p.add_argument("--gammas", default=None, help="comma-separated ordinals; default: the profile breakpoints")
    p.add_argument("--oracle", action="store_true", help="use the pointwise oracle only")
    _budget_flags(p)

    p = sub.add_parser("verify", help="cross-check closed forms against the oracle")
    _term_flags(p)
    p.add_argument("--lemma", choices=("powers", "disjoint-union", "profile"), default="profile")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--members", type=int, default=12, help="members compared in the disjoint-union check")
    p.add_argument("--max-gamma", type=int, default=3)
    _budget_flags(p)

    p = sub.add_parser("simplex", help="simplex computations")
    p.add_argument("action", choices=("demo-3-28", "probe"))
    p.add_argument("--space", default="omega(2,1)")
    p.add_argument("--gammas", default="")
    p.add_argument("--a", default="1")
    _budget_flags(p)
    return parser


_COMMANDS = {
    "ordinal": cmd_ordinal,
    "rank": cmd_rank,
    "realize": cmd_realize,
    "utable": cmd_utable,
    "verify": cmd_verify,
    "simplex": cmd_simplex,
}

_ECHO_SKIP = {"out", "timing", "format"}


def dispatch(argv: list) -> RunReport:
    """Parse ``argv`` and run one subcommand; usage errors raise ``SystemExit(2)``."""
    args = build_parser().parse_args(argv)
    echo = {k: v for k, v in sorted(vars(args).items()) if k not in _ECHO_SKIP and v is not None}
    started = time.perf_counter()
    status, results, error = "ok", None, None
    try:
        results = _COMMANDS[args.command](args)
        if isinstance(results, dict) and results.get("ok") is False:
            status = "hypothesis-violation"
            error = "verification mismatch"
    except HypothesisViolation as e:
        status, error = "hypothesis-violation", str(e)
    except (_Undetermined, OracleUnsupported, NoClosedForm) as e:
        status, error = "budget-exceeded", str(e)
    report = RunReport(schema=SCHEMA, command=echo, status=status, results=results)
    if error is not None:
        report["error"] = error
    if args.timing:
        report["timing_ms"] = round((time.perf_counter() - started) * 1000)
    report.format = args.format
    report.out = args.out
    return report


def serialize(report: dict, fmt_: str = "json") -> str:
    """Canonical text: sorted-key JSON, or TSV of ``rows`` with a fixed header."""
    if fmt_ == "tsv":
        lines = ["gamma\tnorm\tat_marked"]
        rows = (report.get("results") or {}).get("rows", [])
        lines += [f"{r['gamma']}\t{r['norm']}\t{r['at_marked']}" for r in rows if "norm" in r]
        return "\n".join(lines) + "\n"
    return json.dumps(report, sort_keys=True, indent=2, default=str) + "\n"


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    # write to a sibling temp file and rename, so a failure never leaves a partial report
    folder = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".ordacc-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, out)


def main(argv: Optional[list] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        report = dispatch(argv)
    except SystemExit as e:
        return int(e.code or 0)
    except (ValueError, OrdinalSyntaxError, TypeError) as e:
        sys.stderr.write(f"ordacc: {e}\n")
        return EXIT_USAGE
    _write(serialize(report, report.format), report.out)
    if report["status"] != "ok":
        sys.stderr.write(f"ordacc: {report['status']}: {report.get('error', '')}\n")
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())

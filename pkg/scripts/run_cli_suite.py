"""Run a fixed set of CLI commands twice and compare the JSON artifacts byte for byte.

Usage: python3 scripts/run_cli_suite.py [OUTDIR]

Each pass runs every command in a fresh interpreter and writes ``NN-name.json``
under ``OUTDIR/pass1`` and ``OUTDIR/pass2``.  Exit status 0 means every artifact
was produced and both passes agree.
"""

from __future__ import annotations

import argparse
import filecmp
import subprocess
import sys
import tempfile
from pathlib import Path

SUITE = [
    ("ordinal", ["ordinal", "w^2*3+w*2", "--plus", "w^2", "--natural-sum", "w+1", "--fundamental", "4"]),
    ("rank", ["rank", "--space", "omega(2,3)", "--point", "o:w^2+w"]),
    ("realize-3", ["realize", "--alpha", "3", "--tree"]),
    ("realize-cnf", ["realize", "--alpha", "w^2*3+w*2+5"]),
    ("realize-plus", ["realize", "--alpha", "w", "--plus"]),
    ("utable-2", ["utable", "--alpha", "2", "--oracle", "--gammas", "0,1,2,3"]),
    ("utable-w", ["utable", "--alpha", "w+1"]),
    ("verify-profile", ["verify", "--alpha", "3"]),
    ("verify-powers", ["verify", "--lemma", "powers", "--p", "3"]),
    ("verify-union", ["verify", "--lemma", "disjoint-union", "--max-gamma", "2"]),
    ("verify-violation", ["verify", "--sequence", "prod(base(2),base(1))"]),
    ("simplex-demo", ["simplex", "demo-3-28"]),
    ("simplex-probe", ["simplex", "probe", "--space", "omega(2,1)", "--gammas", "0,1,2,3"]),
]


def run_pass(folder: Path) -> list[str]:
    """Write every artifact into ``folder``; returns the names that failed to appear."""
    folder.mkdir(parents=True, exist_ok=True)
    missing = []
    for i, (name, argv) in enumerate(SUITE):
        out = folder / f"{i:02d}-{name}.json"
        subprocess.run([sys.executable, "-m", "ordacc.cli", *argv, "--out", str(out)], check=False,
                       stderr=subprocess.DEVNULL)
        if not out.exists():
            missing.append(name)
    return missing


def compare(outdir: Path) -> tuple[bool, list[str]]:
    a, b = outdir / "pass1", outdir / "pass2"
    problems = [f"missing in pass {p}: {n}" for p, d in ((1, a), (2, b)) for n in run_pass(d)]
    names = sorted(p.name for p in a.glob("*.json"))
    _, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    problems += [f"differs: {n}" for n in mismatch] + [f"unreadable: {n}" for n in errors]
    return not problems, problems


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default=None)
    args = ap.parse_args(argv)
    outdir = Path(args.outdir) if args.outdir else Path(tempfile.mkdtemp(prefix="ordacc-suite-"))
    ok, problems = compare(outdir)
    for line in problems:
        print(line)
    print(f"{len(SUITE)} artifacts, {'identical' if ok else 'NOT identical'} across passes ({outdir})")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())

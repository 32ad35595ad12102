#!/usr/bin/env python3
"""Distance to the classical values as q -> 1, with the implied slope err/(1-q)."""

import argparse
from fractions import Fraction

import mpmath

import qdirichlet.verify as verify
from qdirichlet.verify import default_grid, run_suite


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", nargs="+", default=["9/10", "99/100", "999/1000", "9999/10000"])
    args = ap.parse_args()

    verify.QLIMIT_GRID = tuple(args.q)
    grid = [p for p in default_grid("I12_qlimits") if p["kind"] != "beta1_convention" and p["n"] > 0]
    gaps = [1 - Fraction(q) for q in args.q]
    print("kind                 n r chi   classical  " + "  ".join(f"err@{q:>10}" for q in args.q) + "   slope")
    for rep in run_suite("I12_qlimits", grid):
        p, errs = rep.params, rep.extra["errors"]
        slope = errs[-1] / mpmath.mpf(gaps[-1].numerator) * gaps[-1].denominator
        cols = "  ".join(f"{mpmath.nstr(e, 4):>14}" for e in errs)
        print(f"{p['kind']:20} {p['n']} {p.get('r', 1)} {p.get('chi', '-'):5} {mpmath.nstr(mpmath.re(rep.rhs), 6):>10}  {cols}  {mpmath.nstr(slope, 5)}")


if __name__ == "__main__":
    main()

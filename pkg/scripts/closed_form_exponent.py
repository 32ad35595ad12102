#!/usr/bin/env python3
"""Closed form with [F]^(n-r) versus [F]^n, both against the direct series."""

import argparse

import mpmath

from qdirichlet.verify import adjudicate_eq14


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--chi", default="4:1")
    ap.add_argument("--q", default="1/2")
    args = ap.parse_args()

    grid = [{"n": n, "r": r, "chi": args.chi, "q": args.q} for r in (1, 2, 3) for n in range(r, r + 5)]
    print(f"{'r':>2} {'n':>2}  {'corrected rel_err':>18}  {'printed/direct':>22}  {'[F]^r':>22}")
    for rep in adjudicate_eq14(grid):
        p, x = rep.params, rep.extra
        ratio = mpmath.nstr(mpmath.re(x["printed_ratio"]), 15)
        print(f"{p['r']:>2} {p['n']:>2}  {mpmath.nstr(rep.rel_err, 3):>18}  {ratio:>22}  {mpmath.nstr(x['expected_ratio'], 15):>22}")


if __name__ == "__main__":
    main()

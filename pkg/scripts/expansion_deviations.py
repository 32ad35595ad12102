#!/usr/bin/env python3
"""Smallest-term evaluation of the H and L expansions against the series route."""

import mpmath

from qdirichlet.verify import run_suite


def main() -> None:
    print(f"{'fn':2} {'params':>14} {'s':>5} {'variant':>9}  {'rel_err':>9}  terms")
    for rep in run_suite("I11_expansions"):
        p = rep.params
        what = str(p["a"]) if p["fn"] == "H" else p["chi"]
        mark = " benign" if p.get("benign") else ""
        label = f"r={p['r']} {what}"
        print(f"{p['fn']:2} {label:>14} {p['s']:>5} {p['variant']:>9}  "
              f"{mpmath.nstr(rep.rel_err, 3):>9}  {rep.extra['terms_used']}{mark}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Run every identity suite on its default grid and write the JSON report."""

import argparse
import json
import time
from pathlib import Path

from qdirichlet import __version__
from qdirichlet.numerics import PrecisionCtx
from qdirichlet.verify import SUITE_IDS, run_suite


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--digits", type=int, default=50)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/verification.json"))
    args = ap.parse_args()

    ctx = PrecisionCtx(digits=args.digits)
    results, timings = [], {}
    for suite in SUITE_IDS:
        t0 = time.perf_counter()
        reports = run_suite(suite, ctx=ctx, jobs=args.jobs)
        timings[suite] = time.perf_counter() - t0
        asserted = [r for r in reports if r.asserted]
        bad = [r for r in asserted if not r.passed]
        tag = "INFO" if not asserted else ("PASS" if not bad else "FAIL")
        print(f"{tag:4s} {suite:20s} {len(reports):4d} points  {len(bad):3d} failing  {timings[suite]:6.1f}s")
        results.extend(r.to_json(ctx.digits) for r in reports)

    args.out.parent.mkdir(parents=True, exist_ok=True)
    payload = {"meta": {"digits": ctx.digits, "guard": ctx.guard, "version": __version__}, "results": results}
    args.out.write_text(json.dumps(payload, indent=1))
    print(f"wrote {len(results)} reports to {args.out}")


if __name__ == "__main__":
    main()

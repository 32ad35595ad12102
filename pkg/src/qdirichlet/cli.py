"""Command-line front end: ``qdirichlet compute | table | verify``.

Exit codes: 0 success, 1 a verification suite failed, 2 usage error,
3 evaluation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import mpc, mpf

from . import __version__
from .characters import parse_character
from .numerics import PrecisionCtx, QDirichletError, QParam, to_mpc
from .qbernoulli import TowerElem, beta_q, beta_q_poly, gen_beta_chi, multi_B, multi_gen_beta_chi
from .results import EvalResult
from .verify import SUITE_IDS, all_asserted_pass, run_suite
from .zeta_l import H, L, multi_qzeta

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_EVAL = 0, 1, 2, 3

FUNCTIONS = ("beta_q", "beta_q_poly", "multi_B", "gen_beta_chi", "multi_gen_beta_chi", "zeta", "H", "L")

REQUIRED = {
    "beta_q": ("n", "q"),
    "beta_q_poly": ("n", "x", "q"),
    "multi_B": ("n", "r", "x", "q"),
    "gen_beta_chi": ("n", "chi", "q"),
    "multi_gen_beta_chi": ("n", "r", "chi", "q"),
    "zeta": ("r", "s", "x", "q"),
    "H": ("r", "s", "a", "F", "q"),
    "L": ("r", "s", "chi", "q"),
}

DEFAULT_ROUTE = {
    "beta_q": "recurrence",
    "beta_q_poly": "binomial",
    "multi_B": "series",
    "gen_beta_chi": "series",
    "multi_gen_beta_chi": "series",
    "zeta": "series",
    "H": "series",
    "L": "series",
}

PARAM_COLUMNS = ("n", "r", "x", "s", "q", "chi", "a", "F")
CSV_COLUMNS = ("function",) + PARAM_COLUMNS + ("route", "re", "im", "error_bound", "mode", "reason")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Query:
    """One evaluation request; every field is kept in its textual form."""

    fn: str
    n: int | None = None
    r: int | None = None
    x: str | None = None
    s: str | None = None
    q: str | None = None
    chi: str | None = None
    a: str | None = None
    F: int | None = None
    route: str | None = None
    variant: str = "corrected"

    def params(self) -> dict:
        return {k: getattr(self, k) for k in REQUIRED[self.fn]}


def parse_s(text: str) -> mpc:
    parts = text.split(",")
    if len(parts) > 2:
        raise UsageError(f"--s expects re[,im], got {text!r}")
    try:
        re_ = mpf(parts[0])
        im_ = mpf(parts[1]) if len(parts) == 2 else mpf(0)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"cannot parse s from {text!r}") from exc
    return mpc(re_, im_)


def _parse_x(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse x from {text!r}") from exc


def evaluate(query: Query, ctx: PrecisionCtx) -> EvalResult:
    """Dispatch a query to the library; raises QDirichletError on numerical failure."""
    missing = [k for k in REQUIRED[query.fn] if getattr(query, k) is None]
    if missing:
        raise UsageError(f"--fn {query.fn} needs " + ", ".join("--" + m for m in missing))
    try:
        q = QParam.parse(query.q)
        chi = parse_character(query.chi) if query.chi is not None else None
    except QDirichletError as exc:
        raise UsageError(str(exc)) from exc
    x = _parse_x(query.x) if query.x is not None else None
    s = parse_s(query.s) if query.s is not None else None
    a = [int(v) for v in query.a.split(",")] if query.a is not None else None
    route = query.route or DEFAULT_ROUTE[query.fn]
    n, r, fn = query.n, query.r, query.fn

    if fn == "beta_q":
        v = beta_q(n, q, route, ctx)
        if isinstance(v, TowerElem):
            return EvalResult(to_mpc(v.realize(q, ctx)), mpf(0), route, n + 1, "exact", exact=v)
        return EvalResult(to_mpc(v), mpf(0), route, n + 1, "certified")
    if fn == "beta_q_poly":
        return beta_q_poly(n, x, q, route, ctx, full=True)
    if fn == "multi_B":
        return multi_B(n, r, x, q, route, ctx, variant=query.variant, full=True)
    if fn == "gen_beta_chi":
        return gen_beta_chi(n, chi, q, route, ctx, full=True)
    if fn == "multi_gen_beta_chi":
        return multi_gen_beta_chi(n, r, chi, q, route, ctx, variant=query.variant, full=True)
    if fn == "zeta":
        return multi_qzeta(r, s, x, q, route, ctx)
    if fn == "H":
        return H(r, s, a, query.F, q, route, ctx, variant=query.variant)
    return L(r, s, chi, q, route, ctx, variant=query.variant)


def fmt(x, digits: int) -> str:
    return mpmath.nstr(x, digits, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)


def fmt_bound(x) -> str:
    return mpmath.nstr(mpf(x), 6)


def record(query: Query, result: EvalResult, ctx: PrecisionCtx) -> dict:
    v = to_mpc(result.value)
    return {
        "function": query.fn,
        "params": query.params(),
        "value": [fmt(v.real, ctx.digits), fmt(v.imag, ctx.digits)],
        "error_bound": fmt_bound(result.error_bound),
        "route": result.route,
        "terms_used": result.terms_used,
        "mode": result.mode,
        "flags": list(result.flags),
    }


def error_record(query: Query, exc: Exception) -> dict:
    return {"function": query.fn, "params": query.params(), "error": type(exc).__name__, "reason": str(exc)}


def _row(query: Query, ctx: PrecisionCtx) -> dict:
    # mpc() rounds to the ambient precision, so parse and format inside the context
    try:
        with ctx.workprec():
            return record(query, evaluate(query, ctx), ctx)
    except QDirichletError as exc:
        return error_record(query, exc)


def _meta(ctx: PrecisionCtx) -> dict:
    return {"digits": ctx.digits, "guard": ctx.guard, "version": __version__}


def dump_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=False)


def render(rows: list[dict], ctx: PrecisionCtx, form: str) -> str:
    if form == "json":
        return dump_json({"meta": _meta(ctx), "results": rows})
    if form == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in rows:
            p = row["params"]
            re_, im_ = row.get("value", ["", ""])
            w.writerow(
                [row["function"]]
                + [p.get(c, "") if p.get(c) is not None else "" for c in PARAM_COLUMNS]
                + [row.get("route", ""), re_, im_, row.get("error_bound", ""), row.get("mode", ""), row.get("reason", "")]
            )
        return buf.getvalue().rstrip("\n")
    lines = []
    for row in rows:
        params = " ".join(f"{k}={v}" for k, v in row["params"].items())
        if "error" in row:
            lines.append(f"{row['function']}({params}): {row['error']}: {row['reason']}")
        else:
            re_, im_ = row["value"]
            val = re_ if mpf(im_) == 0 else f"{re_} + {im_}i"
            lines.append(f"{row['function']}({params}) = {val}  [bound {row['error_bound']}, {row['route']}, {row['mode']}]")
    return "\n".join(lines)


def _normalize_argv(argv: Sequence[str]) -> list[str]:
    """Glue values that start with '-' onto --s / --s-list so argparse accepts them."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in ("--s", "--s-list", "--x"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _add_precision(p: argparse.ArgumentParser) -> None:
    p.add_argument("--digits", type=int, help="significant digits (default 50, env QDIRICHLET_DIGITS)")
    p.add_argument("--guard", type=int, help="guard digits (default 12)")
    p.add_argument("--max-terms", type=int, help="series term cap (env QDIRICHLET_MAX_TERMS)")


def _add_function(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fn", required=True, choices=FUNCTIONS)
    p.add_argument("--r", type=int)
    p.add_argument("--x")
    p.add_argument("--q")
    p.add_argument("--chi", help="character spec <modulus>:<index>")
    p.add_argument("--a", help="comma-separated residues for H")
    p.add_argument("--F", type=int)
    p.add_argument("--route")
    p.add_argument("--variant", choices=("corrected", "printed"), default="corrected")
    p.add_argument("--format", choices=("json", "csv", "plain"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdirichlet", description="q-Bernoulli numbers and multiple q-L-functions")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="evaluate one value")
    _add_function(c)
    c.add_argument("--n", type=int)
    c.add_argument("--s", help="re[,im]")
    _add_precision(c)

    t = sub.add_parser("table", help="evaluate over a range of n or a list of s")
    _add_function(t)
    t.add_argument("--n", type=int)
    t.add_argument("--s", help="re[,im]")
    t.add_argument("--n-from", type=int)
    t.add_argument("--n-to", type=int)
    t.add_argument("--s-list", help="values separated by ';' (or ',' for real values)")
    t.add_argument("--jobs", type=int, default=1)
    _add_precision(t)

    v = sub.add_parser("verify", help="run identity suites")
    g = v.add_mutually_exclusive_group(required=True)
    g.add_argument("--suite", action="append", help="suite id (repeatable)")
    g.add_argument("--all", action="store_true")
    v.add_argument("--grid", help="JSON list of grid points (or @path) replacing the default grid")
    v.add_argument("--json", action="store_true", help="emit full JSON reports")
    v.add_argument("--jobs", type=int, default=1)
    _add_precision(v)
    return parser


def _ctx(args) -> PrecisionCtx:
    try:
        ctx = PrecisionCtx.from_env(digits=args.digits, max_terms=args.max_terms)
        if args.guard is not None:
            ctx = replace(ctx, guard=args.guard)
        return ctx
    except QDirichletError as exc:
        raise UsageError(str(exc)) from exc


def _query(args, **over) -> Query:
    fields = dict(
        fn=args.fn, n=args.n, r=args.r, x=args.x, s=args.s, q=args.q, chi=args.chi,
        a=args.a, F=args.F, route=args.route, variant=args.variant,
    )
    fields.update(over)
    return Query(**fields)


def _split_s_list(text: str) -> list[str]:
    if ";" in text:
        return [t.strip() for t in text.split(";") if t.strip()]
    return [t.strip() for t in text.split(",") if t.strip()]


def _table_queries(args) -> list[Query]:
    if args.s_list is not None:
        return [_query(args, s=s) for s in _split_s_list(args.s_list)]
    if args.n_from is None or args.n_to is None:
        raise UsageError("table needs --n-from/--n-to or --s-list")
    if args.n_to < args.n_from:
        raise UsageError("--n-to must be >= --n-from")
    if args.fn in ("zeta", "H", "L"):
        return [_query(args, s=str(-n)) for n in range(args.n_from, args.n_to + 1)]
    return [_query(args, n=n) for n in range(args.n_from, args.n_to + 1)]


def _row_task(task):
    return _row(*task)


def _load_grid(text: str):
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            text = fh.read()
    try:
        grid = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--grid is not valid JSON: {exc}") from exc
    if not isinstance(grid, list):
        raise UsageError("--grid must be a JSON list of objects")
    return grid


def cmd_compute(args, out) -> int:
    ctx = _ctx(args)
    row = _row(_query(args), ctx)
    code = EXIT_EVAL if "error" in row else EXIT_OK
    print(render([row], ctx, args.format), file=out)
    return code


def cmd_table(args, out) -> int:
    ctx = _ctx(args)
    queries = _table_queries(args)
    for q in queries:
        missing = [k for k in REQUIRED[q.fn] if getattr(q, k) is None]
        if missing:
            raise UsageError(f"--fn {q.fn} needs " + ", ".join("--" + m for m in missing))
    tasks = [(q, ctx) for q in queries]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_row_task, tasks))
    else:
        rows = [_row_task(t) for t in tasks]
    print(render(rows, ctx, args.format), file=out)
    return EXIT_EVAL if any("error" in r for r in rows) else EXIT_OK


def cmd_verify(args, out) -> int:
    ctx = _ctx(args)
    suites = list(SUITE_IDS) if args.all else args.suite
    unknown = [s for s in suites if s not in SUITE_IDS]
    if unknown:
        raise UsageError(f"unknown suite(s) {', '.join(unknown)}; choose from {', '.join(SUITE_IDS)}")
    grid = _load_grid(args.grid) if args.grid else None
    if grid is not None and len(suites) != 1:
        raise UsageError("--grid needs exactly one --suite")
    reports = []
    for suite in suites:
        reports.extend(run_suite(suite, grid, ctx, jobs=args.jobs))
    ok = all_asserted_pass(reports)
    if args.json:
        payload = {"meta": _meta(ctx), "results": [r.to_json(ctx.digits) for r in reports]}
        print(dump_json(payload), file=out)
    else:
        for suite in suites:
            mine = [r for r in reports if r.suite == suite]
            asserted = [r for r in mine if r.asserted]
            failed = [r for r in asserted if not r.passed]
            worst = max((r.rel_err for r in asserted if r.rel_err == r.rel_err), default=mpf(0))
            if asserted:
                status = "PASS" if not failed else "FAIL"
                detail = f"{len(asserted) - len(failed)}/{len(asserted)} pass, worst rel_err {fmt_bound(worst)}"
            else:
                status = "INFO"
                detail = f"{sum(r.passed for r in mine)}/{len(mine)} within heuristic tolerance (not asserted)"
            print(f"{status} {suite}: {detail}", file=out)
            for r in failed:
                print(f"    fail {json.dumps(r.params)} rel_err={fmt_bound(r.rel_err)} {r.reason}".rstrip(), file=out)
    return EXIT_OK if ok else EXIT_FAIL


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    argv = _normalize_argv(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    handler = {"compute": cmd_compute, "table": cmd_table, "verify": cmd_verify}[args.command]
    try:
        return handler(args, out)
    except UsageError as exc:
        print(f"qdirichlet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())

import json

import pytest
from mpmath import mpf

from qdirichlet.numerics import PrecisionCtx
from qdirichlet.results import EvalResult
from qdirichlet.verify import (
    SUITE_IDS,
    IdentityReport,
    adjudicate_eq14,
    all_asserted_pass,
    compare,
    default_grid,
    run_suite,
)

CTX = PrecisionCtx()


@pytest.mark.parametrize("suite", SUITE_IDS)
def test_every_suite_has_a_grid(suite):
    grid = default_grid(suite)
    assert grid
    json.dumps(grid)  # grids are plain data


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("I99_nothing")


def test_recurrence_suite_is_exact():
    reports = run_suite("I1_recurrence")
    assert len(reports) == 124
    assert all(r.passed and r.mode == "exact" for r in reports)


def test_interpolation_suite():
    reports = run_suite("I9_eq8")
    assert all(r.passed for r in reports)
    assert max(r.rel_err for r in reports) <= mpf("1e-25")


def test_character_suite():
    reports = run_suite("I13_char_sanity")
    assert all(r.passed for r in reports)
    assert {r.params["kind"] for r in reports} >= {"sum_zero", "orthogonality", "multiplicativity"}


def test_routes_are_named_and_distinct():
    for suite in ("I2_poly_at_zero", "I4_eq15", "I10_eq12"):
        point = default_grid(suite)[5]
        (r,) = run_suite(suite, [point])
        assert r.routes[0] and r.routes[1] and r.routes[0] != r.routes[1]


def test_errors_are_captured_per_point():
    reports = run_suite("I9_eq8", [{"r": 1, "n": 2, "chi": "4:9", "q": "1/2"}, {"r": 1, "n": 2, "chi": "4:1", "q": "1/2"}])
    assert not reports[0].passed and reports[0].mode == "error" and "DomainError" in reports[0].reason
    assert reports[1].passed


def test_heuristic_suite_never_asserts():
    grid = [p for p in default_grid("I11_expansions") if p["variant"] == "printed"][:3]
    reports = run_suite("I11_expansions", grid)
    assert all(r.mode == "heuristic" and not r.asserted for r in reports)
    assert all_asserted_pass(reports)


def test_exponent_adjudication_example():
    (r,) = adjudicate_eq14([{"n": 4, "r": 2, "chi": "4:1", "q": "1/2"}])
    assert r.passed
    assert r.extra["expected_ratio"] == mpf(225) / 64
    assert r.extra["ratio_rel_err"] < mpf("1e-40")
    assert r.extra["printed_rel_err"] > 1


def test_exponent_adjudication_r1_hand_case():
    (r,) = adjudicate_eq14([{"n": 1, "r": 1, "chi": "4:1", "q": "1/2"}])
    assert r.passed and r.rel_err <= CTX.identity_tolerance


def test_determinism_and_concurrency():
    grid = default_grid("I10_eq12")[:6]
    serial = [r.to_json(CTX.digits) for r in run_suite("I10_eq12", grid)]
    again = [r.to_json(CTX.digits) for r in run_suite("I10_eq12", grid)]
    pooled = [r.to_json(CTX.digits) for r in run_suite("I10_eq12", grid, jobs=2)]
    assert json.dumps(serial) == json.dumps(again) == json.dumps(pooled)


def test_pass_rule_uses_bounds():
    with CTX.workprec():
        off = mpf(1) + mpf("1e-20")
        assert not compare("t", {}, mpf(1), off, CTX, ("a", "b")).passed
        loose = EvalResult(mpf(1), mpf("1e-19"), "a")
        assert compare("t", {}, loose, off, CTX, ("a", "b")).passed


def test_floor_protects_zero_values():
    with CTX.workprec():
        r = compare("t", {}, mpf(0), mpf("1e-80"), CTX, ("a", "b"))
        assert r.passed and abs(r.rel_err - mpf("1e-30")) < mpf("1e-40")


def test_report_json_shape():
    (r,) = run_suite("I7_eq11", [{"r": 1, "n": 1, "x": "1", "q": "1/2"}])
    assert isinstance(r, IdentityReport)
    payload = r.to_json(CTX.digits)
    assert payload["pass"] is True
    assert set(payload) >= {"suite", "params", "lhs", "rhs", "abs_err", "rel_err", "lhs_bound", "rhs_bound", "mode"}

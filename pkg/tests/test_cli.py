import csv
import io
import json
import subprocess
import sys

import pytest
from mpmath import mpf, workdps

from qdirichlet.cli import EXIT_EVAL, EXIT_OK, EXIT_USAGE, Query, evaluate, main
from qdirichlet.numerics import PrecisionCtx


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def test_compute_beta0():
    code, out = run("compute", "--fn", "beta_q", "--n", "0", "--q", "1/2", "--digits", "50")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["meta"] == {"digits": 50, "guard": 12, "version": "0.1.0"}
    (rec,) = doc["results"]
    assert rec["value"][0].startswith("0.72134752044448170367996234050094606871332297")
    assert mpf(rec["error_bound"]) <= mpf("1e-50")


def test_compute_zeta_negative_s():
    code, out = run("compute", "--fn", "zeta", "--r", "1", "--s", "-1", "--x", "1", "--q", "1/2")
    assert code == EXIT_OK
    value = json.loads(out)["results"][0]["value"][0]
    assert value.startswith("1.33333333333333333333333333333333333333333333333")


def test_negint_and_series_agree():
    base = ["compute", "--fn", "L", "--r", "2", "--s", "-3", "--chi", "4:1", "--q", "1/2"]
    a = json.loads(run(*base, "--route", "negint")[1])["results"][0]
    b = json.loads(run(*base, "--route", "series")[1])["results"][0]
    with workdps(60):
        gap = abs(mpf(a["value"][0]) - mpf(b["value"][0]))
        assert gap <= mpf(a["error_bound"]) + mpf(b["error_bound"]) + mpf("1e-49")


def test_complex_s():
    code, out = run("compute", "--fn", "L", "--r", "1", "--s", "-0.5,1.5", "--chi", "5:1", "--q", "1/2", "--digits", "20")
    rec = json.loads(out)["results"][0]
    assert code == EXIT_OK and rec["params"]["s"] == "-0.5,1.5" and mpf(rec["value"][1]) != 0


def test_table_csv_rows():
    code, out = run("table", "--fn", "beta_q", "--n-from", "0", "--n-to", "10", "--q", "1/2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and len(rows) == 11
    assert [int(r["n"]) for r in rows] == list(range(11))
    assert {"re", "im", "error_bound", "mode"} <= set(rows[0])


def test_table_s_list_matches_negint():
    code, out = run("table", "--fn", "L", "--r", "1", "--chi", "3:1", "--q", "1/2", "--s-list", "-1,-2,-3")
    rows = json.loads(out)["results"]
    assert code == EXIT_OK and len(rows) == 3
    for row, n in zip(rows, (1, 2, 3)):
        _, ref = run("compute", "--fn", "L", "--r", "1", "--chi", "3:1", "--q", "1/2", "--s", str(-n), "--route", "negint")
        with workdps(60):
            assert abs(mpf(row["value"][0]) - mpf(json.loads(ref)["results"][0]["value"][0])) < mpf("1e-48")


def test_table_zero_rows():
    code, out = run("table", "--fn", "multi_B", "--r", "2", "--n-from", "0", "--n-to", "1", "--x", "0", "--q", "1/2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [mpf(r["re"]) for r in rows] == [0, 0]


@pytest.mark.parametrize(
    "argv",
    [
        ("compute", "--fn", "nope"),
        ("compute", "--fn", "beta_q", "--q", "1/2"),
        ("compute", "--fn", "beta_q", "--n", "1", "--q", "2"),
        ("compute", "--fn", "L", "--r", "1", "--s", "2", "--chi", "4:7", "--q", "1/2"),
        ("compute", "--fn", "beta_q", "--n", "1", "--q", "1/2", "--unknown"),
        ("verify", "--suite", "I0_missing"),
        ("table", "--fn", "beta_q", "--q", "1/2"),
    ],
)
def test_usage_errors(argv):
    assert run(*argv)[0] == EXIT_USAGE


def test_evaluation_error_is_machine_readable():
    code, out = run("compute", "--fn", "H", "--r", "1", "--s", "1", "--a", "4", "--F", "4", "--q", "1/2", "--route", "expansion")
    assert code == EXIT_EVAL
    rec = json.loads(out)["results"][0]
    assert rec["error"] == "PoleProximityError" and "pole" in rec["reason"]


def test_verify_suite_json():
    code, out = run("verify", "--suite", "I6_eq14_corrected", "--json", "--grid", '[{"n": 4, "r": 2, "chi": "4:1", "q": "1/2"}]')
    assert code == EXIT_OK
    (rep,) = json.loads(out)["results"]
    assert {"printed_ratio", "expected_ratio", "ratio_rel_err"} <= set(rep["extra"])


def test_verify_plain_summary():
    code, out = run("verify", "--suite", "I1_recurrence")
    assert code == EXIT_OK and out.startswith("PASS I1_recurrence: 124/124")


def test_output_is_deterministic():
    argv = ("table", "--fn", "gen_beta_chi", "--chi", "5:1", "--q", "9/10", "--n-from", "0", "--n-to", "4")
    assert run(*argv) == run(*argv)


def test_round_trip():
    ctx = PrecisionCtx()
    _, out = run("table", "--fn", "multi_gen_beta_chi", "--r", "2", "--chi", "5:1", "--q", "1/2", "--n-from", "2", "--n-to", "4")
    for rec in json.loads(out)["results"]:
        q = Query(fn=rec["function"], route=rec["route"], **rec["params"])
        with ctx.workprec():
            again = evaluate(q, ctx)
            assert abs(again.value.real - mpf(rec["value"][0])) <= again.error_bound + mpf(10) ** -(ctx.digits - 1) * max(1, abs(again.value))


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qdirichlet", "compute", "--fn", "beta_q", "--n", "1", "--q", "1/2", "--format", "plain", "--digits", "12"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and "-0.557304959111" in proc.stdout

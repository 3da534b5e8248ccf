import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from eisdensity.cli import (
    EXIT_BUDGET,
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    REPORT_CSV_HEADER,
    RunConfig,
    display,
    main,
)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv)
    assert code == EXIT_OK, err
    return json.loads(out)


def test_density_width():
    body = run_json("density", "--q", "2", "--d", "2", "--kind", "monic", "--width", "1e-12")
    iv = body["interval"]
    assert Fraction(iv["hi"]) - Fraction(iv["lo"]) <= Fraction(2, 10**12)
    assert body["certified"] is True
    assert len(body["display"]["midpoint"].replace("0.", "", 1)) == 15


def test_density_finite_places():
    iv = run_json("density", "--q", "2", "--d", "2", "--kind", "monic", "--places", "(x)")["interval"]
    assert iv["lo"] == iv["hi"] == "1/8"


def test_density_rejects_degree_one():
    code, out, err = run("density", "--q", "2", "--d", "1")
    assert code == EXIT_USAGE and out == ""
    msg = json.loads(err)
    assert msg["error"] == "usage" and "d > 1" in msg["message"]


@pytest.mark.parametrize("argv", [
    ["density", "--q", "6"],
    ["density", "--q", "2", "--kind", "weird"],
    ["density", "--q", "2", "--bogus"],
    ["verify", "exact", "--q", "2", "--divisor", "4*inf"],
    ["verify", "exact", "--q", "2", "--T", "(x)", "--divisor", "4*(x)"],
    ["places", "list", "--q", "2", "--degree", "0"],
])
def test_usage_errors(argv):
    code, _, err = run(*argv)
    assert code == EXIT_USAGE
    assert "message" in json.loads(err)


def test_density_truncated_only_for_unverified_spectrum():
    body = run_json("density", "--q", "2", "--L", "1,0,2", "--genus", "1", "--cutoff", "5")
    assert body["certified"] is False and "truncated only" in body["note"]
    body = run_json("density", "--q", "2", "--L", "1,0,2", "--genus", "1", "--cutoff", "6",
                    "--majorant", "2", "--d", "4", "--width", "1/64")
    assert body["certified"] is True


def test_density_unattainable_width():
    code, _, err = run("density", "--q", "2", "--L", "1,0,2", "--genus", "1", "--cutoff", "4",
                       "--majorant", "2", "--width", "1e-15")
    assert code == EXIT_USAGE
    assert "best_width" in json.loads(err)


def test_density_spectrum_file(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"q": 2, "genus": 0, "counts": {"1": 2, "2": 1}, "cutoff": 2,
                                "provenance": "explicit", "beyond": "zero"}))
    iv = run_json("density", "--q", "2", "--spectrum", str(path), "--width", "1e-9")["interval"]
    assert iv["lo"] == iv["hi"] == str(1 - Fraction(2989, 4096))


def test_verify_exact():
    body = run_json("verify", "exact", "--q", "2", "--d", "2", "--kind", "monic", "--T", "(x)",
                    "--divisor", "4*inf")
    (rep,) = body["reports"]
    assert rep["verdict"] == "exact-match"
    assert rep["observed"] == {"num": "896", "den": "1024"}


def test_verify_exact_budget():
    argv = ["verify", "exact", "--q", "2", "--T", "(x)", "--divisor", "30*inf"]
    code, _, err = run(*argv)
    assert code == EXIT_BUDGET and json.loads(err)["error"] == "budget"
    body = run_json(*argv, "--mc-fallback", "--samples", "5000")
    assert "downgraded" in body["reports"][0]["note"]


@pytest.mark.slow
def test_verify_mc_general():
    body = run_json("verify", "mc", "--q", "3", "--d", "3", "--kind", "general", "--degree", "40",
                    "--samples", "1000000", "--seed", "42")
    rep = body["reports"][0]
    assert rep["verdict"] == "z-score" and abs(rep["z_score"]) <= 5


def test_verify_failure_exit_code():
    # a single draw has zero standard error, so it cannot match a non-degenerate density
    code, out, _ = run("verify", "mc", "--q", "2", "--degree", "30", "--samples", "1", "--seed", "3")
    assert code == EXIT_FAILED
    assert json.loads(out)["reports"][0]["passed"] is False


def test_verify_sweep_csv():
    code, out, err = run("verify", "sweep", "--q", "2", "--d", "2", "--degrees", "1:6", "--format", "csv")
    assert code == EXIT_OK, err
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == REPORT_CSV_HEADER
    assert len(rows) == 7
    assert [r[6] for r in rows[1:]] == [str(k) for k in range(1, 7)]


def test_csv_and_json_agree():
    argv = ["verify", "exact", "--q", "2", "--d", "2", "--kind", "general", "--T", "(x)", "--divisor", "4*inf"]
    rep = run_json(*argv)["reports"][0]
    _, out, _ = run(*argv, "--format", "csv")
    row = dict(zip(*list(csv.reader(io.StringIO(out)))))
    assert row["observed"] == f'{rep["observed"]["num"]}/{rep["observed"]["den"]}'
    assert row["expected"] == rep["expected"] == "15/16"
    assert row["verdict"] == rep["verdict"]

    argv = ["verify", "sweep", "--q", "2", "--degrees", "2:2"]
    rep = run_json(*argv)["reports"][0]
    _, out, _ = run(*argv, "--format", "csv")
    row = dict(zip(*list(csv.reader(io.StringIO(out)))))
    for key in ("lo", "hi", "tail", "truncated", "rounding"):
        assert row[f"expected_{key}"] == rep["expected"][key]


def test_places_count():
    body = run_json("places", "count", "--q", "2", "--max-degree", "4")
    assert [(c["degree"], c["count"]) for c in body["counts"]] == [(1, 2), (2, 1), (3, 2), (4, 3)]
    body = run_json("places", "count", "--q", "2", "--max-degree", "4", "--exclude", "(x)")
    assert [(c["degree"], c["count"]) for c in body["counts"]] == [(1, 1), (2, 1), (3, 2), (4, 3)]


def test_places_list():
    assert run_json("places", "list", "--q", "2", "--degree", "2")["places"] == ["x^2+x+1"]
    code, _, err = run("places", "list", "--q", "2", "--degree", "40")
    assert code == EXIT_BUDGET and "27487764474" in json.loads(err)["message"]


def test_config_round_trip(tmp_path):
    argv = ["verify", "sweep", "--q", "3", "--d", "2", "--kind", "general", "--degrees", "0:2",
            "--exclude", "inf,(x)", "--seed", "17"]
    code, out, _ = run(*argv, "--dump-config")
    assert code == EXIT_OK
    cfg = json.loads(out)
    assert RunConfig.from_json(cfg) == RunConfig.from_json(json.loads(json.dumps(cfg)))
    path = tmp_path / "cfg.json"
    path.write_text(out)
    a = run_json(*argv)
    b = run_json("--config", str(path))
    for body in (a, b):
        for r in body["reports"]:
            r.pop("elapsed_ms")
    assert a == b
    assert b["config"] == cfg


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"command": "density", "q": 2, "wat": 1}))
    code, _, _ = run("--config", str(path))
    assert code == EXIT_USAGE


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("EISDENSITY_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run("places", "count", "--q", "3", "--max-degree", "2", "--format", "csv")
    assert code == EXIT_OK and out == ""
    assert (tmp_path / "places-count.csv").read_text().splitlines() == ["degree,count", "1,3", "2,3"]
    target = tmp_path / "sub" / "x.json"
    run("places", "count", "--q", "3", "--max-degree", "1", "--output", str(target))
    assert json.loads(target.read_text())["counts"] == [{"degree": 1, "count": 3}]


def test_display_rounding():
    assert display(Fraction(1, 3)) == "0.333333333333333"
    assert display(Fraction(2, 3)) == "0.666666666666667"
    assert display(Fraction(1, 8)) == "0.125"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "eisdensity", "places", "list", "--q", "3", "--degree", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["places"] == ["x", "x+1", "x+2"]

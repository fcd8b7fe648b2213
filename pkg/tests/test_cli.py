import csv
import io
import json
import subprocess
import sys

import pytest

from a3quartic import cli


def run(*argv):
    return cli.run([str(a) for a in argv])


def test_count_text():
    assert run("count", "--direct", 1)[:2] == (0, "2\n")
    assert run("count", "--torsor", 10)[1] == run("count", "--direct", 10)[1]


def test_lift_example():
    status, out, _ = run("lift", 1, 1, 1, -1, -1)
    assert status == 0
    assert out.strip() == "eta=(1,1,1,1,1,1,1) alpha=(-1,0,1)"


def test_lift_failure_names_invariant(capsys):
    status, out, _ = run("lift", 1, 1, 1, 0, 0, "--format", "json")
    assert status == 1
    rep = json.loads(out)
    assert rep["ok"] is False and "counting region" in rep["invariant"]
    assert "FAILED" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["count", "--torsor", "0"],
    ["count", "--direct", "--torsor", "5"],
    ["lift", "1", "2"],
    ["fit", "--ladder", "100,10"],
    ["peyre", "--tol", "-1"],
    ["lemmas", "--suite", "nope"],
])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as e:
        cli.run(argv)
    assert e.value.code == 2


def test_json_is_byte_identical_across_runs():
    a = run("count", "--torsor", 500, "--format", "json")[1]
    b = run("count", "--torsor", 500, "--format", "json")[1]
    assert a == b
    rep = json.loads(a)
    assert rep["provenance"]["seed"] == 0 and "seconds" not in rep
    assert "seconds" in json.loads(run("count", "--torsor", 5, "--format", "json",
                                       "--timing")[1])


def test_csv_matches_json():
    j = json.loads(run("local-factors", "--pmax", 30, "--format", "json")[1])
    rows = list(csv.DictReader(io.StringIO(run("local-factors", "--pmax", 30,
                                               "--format", "csv")[1])))
    assert len(rows) == len(j["rows"]) == 10
    for r, jr in zip(rows, j["rows"]):
        assert int(r["p"]) == jr["p"]
        assert r["omega_p"] == jr["omega_p"] and r["euler_factor"] == jr["euler_factor"]
        assert r["identity"] == str(jr["identity"])
        assert r["provenance.pmax"] == "30"
    assert j["rows"][1]["omega_p"] == "28/9"


def test_lemmas_inter_json():
    status, out, _ = run("lemmas", "--suite", "inter", "--format", "json")
    rep = json.loads(out)
    assert status == 0 and rep["ok"]
    assert len(rep["parity_classes"]) == 3
    assert rep["max_normalized"] <= rep["gate"]["bound"]
    row = rep["rows"][0]
    assert set(row) >= {"lemma", "instance", "main", "observed", "residual", "normalized"}


def test_fit_reports_gates():
    status, out, _ = run("fit", "--ladder", "100,1000,10000", "--format", "json")
    rep = json.loads(out)
    assert rep["gates"]["consistent"]
    assert status == (0 if all(rep["gates"].values()) else 1)
    assert [r["B"] for r in rep["rows"]] == [100, 1000, 10000]


def test_output_file(tmp_path):
    target = tmp_path / "c.json"
    assert cli.main(["count", "--direct", "3", "--format", "json", "--output", str(target)]) == 0
    assert json.loads(target.read_text())["count"] == 8


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "a3quartic", "count", "--direct", "2"],
                       capture_output=True, text=True, check=True)
    assert p.stdout == "4\n"

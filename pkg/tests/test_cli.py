import csv
import io
import json
import subprocess
import sys

import pytest

from rcthresh import MeasurementRecord, ThresholdEstimate, exclusion_probabilities, load_table, rayleigh, unit_mean_spec
from rcthresh.cli import main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def _kv(text):
    return dict(line.split(": ", 1) for line in text.splitlines() if ": " in line)


def _plot(path):
    lines = path.read_text().splitlines()
    return lines[0], list(csv.DictReader(lines[1:]))


# ---------------------------------------------------------------- estimate


def test_estimate_worked_example():
    code, out, err = run("estimate", "--n", "10", "--n-low", "9", "--mean-field", "50")
    assert code == 0 and err == ""
    kv = _kv(out)
    assert float(kv["unbiased threshold (V/m)"]) == pytest.approx(120, rel=0.05)
    assert float(kv["relative uncertainty"].split()[0]) == pytest.approx(0.035, abs=0.005)
    assert float(kv["biased estimate E_est (normalized)"]) == pytest.approx(1.712, abs=1e-3)
    assert kv["clamped"] == "true"
    assert "lower bound" in kv["note"]


def test_estimate_json_schema_round_trip():
    code, out, _ = run("estimate", "--n", "10", "--n-low", "9", "--mean-field", "50", "--json")
    assert code == 0
    doc = json.loads(out)
    record = MeasurementRecord(**doc.pop("record"))
    est = ThresholdEstimate(**doc)
    assert record == MeasurementRecord(10, 9, 50.0)
    assert set(doc) == set(ThresholdEstimate.__dataclass_fields__)
    assert est.e_thr_abs == pytest.approx(121.98, abs=0.01)


def test_estimate_csv_format():
    code, out, _ = run("estimate", "--n", "20", "--n-low", "11", "--mean-field", "10", "--k-db", "0", "--format", "csv")
    assert code == 0
    (row,) = csv.DictReader(io.StringIO(out))
    assert row["k_db"] == "0.0" and row["n_low"] == "11"
    assert float(row["e_thr_abs"]) == pytest.approx(10 * float(row["e_thr_norm"]), rel=1e-15)


def test_estimate_all_pass_and_fail():
    code, out, err = run("estimate", "--n", "10", "--n-low", "10", "--mean-field", "50")
    assert code == 2 and out == ""
    assert "tune the input power" in err and "increase N" in err
    code, _, err = run("estimate", "--n", "10", "--n-low", "0", "--mean-field", "50")
    assert code == 2 and "lower the input power" in err
    code, _, err = run("estimate", "--n", "10", "--n-low", "1", "--mean-field", "50")
    assert code == 2 and "below the smallest" in err


def test_estimate_with_table(tmp_path):
    path = tmp_path / "t.csv"
    assert run("simulate", "--dist", "rayleigh", "--n", "10", "--method", "oracle", "--out", str(path))[0] == 0
    code, out, _ = run("estimate", "--n", "10", "--n-low", "9", "--mean-field", "50", "--table", str(path), "--json")
    assert code == 0
    base = json.loads(run("estimate", "--n", "10", "--n-low", "9", "--mean-field", "50", "--json")[1])
    assert json.loads(out) == base


def test_estimate_io_errors(tmp_path):
    code, _, err = run("estimate", "--n", "10", "--n-low", "5", "--mean-field", "1", "--table", str(tmp_path / "x.csv"))
    assert code == 3 and "i/o error" in err
    bad = tmp_path / "bad.csv"
    bad.write_text("# rcthresh-table v9; kind=rayleigh\n")
    code, _, err = run("estimate", "--n", "10", "--n-low", "5", "--mean-field", "1", "--table", str(bad))
    assert code == 3 and "version" in err


# ---------------------------------------------------------------- simulate


def test_simulate_oracle_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        code, out, _ = run("simulate", "--dist", "rayleigh", "--n", "10", "--method", "oracle", "--out", str(p))
        assert code == 0 and "wrote 50 rows" in out
    assert a.read_bytes() == b.read_bytes()


def test_simulate_mc_seed_env(tmp_path, monkeypatch):
    args = ["simulate", "--dist", "rice", "--k-db", "3", "--n", "5,10", "--method", "mc", "--trials", "2000", "--grid", "10"]
    monkeypatch.setenv("RCTHRESH_SEED", "17")
    assert run(*args, "--out", str(tmp_path / "env.csv"))[0] == 0
    assert run(*args, "--seed", "17", "--out", str(tmp_path / "flag.csv"))[0] == 0
    assert run(*args, "--seed", "18", "--out", str(tmp_path / "other.csv"))[0] == 0
    env = (tmp_path / "env.csv").read_bytes()
    assert env == (tmp_path / "flag.csv").read_bytes()
    assert env != (tmp_path / "other.csv").read_bytes()
    table = load_table(tmp_path / "env.csv")
    assert table.meta.seed == 17 and table.meta.kind == "rice" and table.meta.k_db == 3.0
    assert len(table.rows) == 20


def test_simulate_json_output(tmp_path):
    path = tmp_path / "t.json"
    assert run("simulate", "--n", "5", "--grid", "5", "--quantile-range", "0.1:0.9", "--out", str(path))[0] == 0
    table = load_table(path)
    assert [r.p_level for r in table.rows][0] == 0.1 and table.meta.quantile_hi == 0.9


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--dist", "rice", "--n", "10", "--out", "x.csv"],
        ["simulate", "--dist", "rayleigh", "--k-db", "3", "--n", "10", "--out", "x.csv"],
        ["simulate", "--n", "10,a", "--out", "x.csv"],
        ["simulate", "--n", "2", "--out", "x.csv"],
        ["simulate", "--n", "10", "--trials", "10", "--method", "mc", "--out", "x.csv"],
        ["simulate", "--n", "10", "--quantile-range", "0.5", "--out", "x.csv"],
        ["estimate", "--n", "10", "--bogus", "1"],
        ["estimate", "--n", "10"],
        ["maxfield", "--n", "10", "--x", "1", "--prob", "0.5"],
        ["plotdata", "--figure", "5", "--out", "x.csv"],
        ["plotdata", "--figure", "4", "--out", "x.csv"],
        ["plotdata", "--figure", "2", "--out", "x.csv"],
        ["nosuchcommand"],
        [],
    ],
)
def test_usage_errors(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, err = run(*argv)
    assert code == 1 and "usage error" in err
    assert not (tmp_path / "x.csv").exists()


def test_bad_seed_env(monkeypatch, tmp_path):
    monkeypatch.setenv("RCTHRESH_SEED", "abc")
    code, _, err = run("simulate", "--n", "5", "--out", str(tmp_path / "t.csv"))
    assert code == 1 and "RCTHRESH_SEED" in err


# ---------------------------------------------------------------- maxfield / exclusion


def test_maxfield_modes():
    assert float(_kv(run("maxfield", "--n", "10")[1])["expected_max_field"]) == pytest.approx(1.9314, abs=1e-3)
    assert float(_kv(run("maxfield", "--n", "10", "--x", "2.0")[1])["max_field_cdf"]) == pytest.approx(0.6429, abs=1e-4)
    doc = json.loads(run("maxfield", "--n", "10", "--prob", "0.95", "--format", "json")[1])
    assert doc["max_field_quantile"] == pytest.approx(2.5917, abs=1e-3)
    code, _, err = run("maxfield", "--n", "10", "--prob", "1.0")
    assert code == 2 and err


def test_exclusion_command():
    code, out, _ = run("exclusion", "--n", "10", "--threshold", "2.4", "--dist", "rayleigh")
    assert code == 0
    assert float(_kv(out)["p_all_below"]) == pytest.approx(0.89677, abs=1e-4)
    code, out, _ = run("exclusion", "--n", "4", "--threshold", "1.0", "--dist", "rice", "--k-db", "0", "--format", "csv")
    (row,) = csv.DictReader(io.StringIO(out))
    below, above = exclusion_probabilities(4, 1.0, unit_mean_spec("rice", 0))
    assert float(row["p_all_below"]) == below and float(row["p_all_above"]) == above
    assert run("exclusion", "--n", "0", "--threshold", "1.0")[0] == 2


# ---------------------------------------------------------------- plotdata


def test_plotdata_figure1_and_4(tmp_path):
    p = tmp_path / "f1.csv"
    assert run("plotdata", "--figure", "1", "--points", "41", "--out", str(p))[0] == 0
    header, rows = _plot(p)
    assert header == "# rcthresh-plot figure=1"
    assert list(rows[0]) == ["x", "pdf", "cdf"] and len(rows) == 41
    assert float(rows[-1]["cdf"]) > 0.99
    p = tmp_path / "f4.csv"
    assert run("plotdata", "--figure", "4", "--k-db", "3", "--out", str(p))[0] == 0
    header, rows = _plot(p)
    assert header == "# rcthresh-plot figure=4; k_db=3.0"
    assert all(float(a["cdf"]) <= float(b["cdf"]) for a, b in zip(rows, rows[1:]))


def test_plotdata_figure3_and_5(tmp_path):
    p = tmp_path / "f3.csv"
    assert run("plotdata", "--figure", "3", "--n", "5,10", "--out", str(p))[0] == 0
    header, rows = _plot(p)
    assert list(rows[0]) == ["n", "e_est_mean", "corr_factor", "rel_std"] and len(rows) == 100
    last10 = [r for r in rows if r["n"] == "10"][-1]
    assert float(last10["corr_factor"]) == pytest.approx(1.4249, abs=1e-3)
    p = tmp_path / "f5.csv"
    code = run("plotdata", "--figure", "5", "--k-db", "0", "--n", "10", "--method", "mc", "--trials", "2000", "--out", str(p))[0]
    assert code == 0
    header, rows = _plot(p)
    assert header.endswith("k_db=0.0") and len(rows) == 50


def test_plotdata_figure6_matches_closed_form(tmp_path):
    p = tmp_path / "f6.csv"
    assert run("plotdata", "--figure", "6", "--n", "5,10,20", "--out", str(p))[0] == 0
    _, rows = _plot(p)
    assert list(rows[0]) == ["n", "e_thr", "p_all_below", "p_all_above"] and len(rows) == 150
    spec = rayleigh()
    for r in rows:
        below, above = exclusion_probabilities(int(r["n"]), float(r["e_thr"]), spec)
        assert float(r["p_all_below"]) == below
        assert float(r["p_all_above"]) == above


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "rcthresh", "estimate", "--n", "10", "--n-low", "10", "--mean-field", "50"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 2 and "increase N" in res.stderr
    res = subprocess.run([sys.executable, "-m", "rcthresh", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "simulate" in res.stdout

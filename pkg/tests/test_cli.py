import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from ustat_assoc import SCHEMES, GridFunction, Sample, generate, gini_fast
from ustat_assoc.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gini_from_csv(tmp_path, capsys):
    f = tmp_path / "sample.csv"
    f.write_text("x\n1\n2\n4\n")
    code, out, _ = run(["gini", "--input", str(f)], capsys)
    assert code == 0 and json.loads(out)["value"] == 2.0
    code, out, _ = run(["gini", "--input", str(f), "--naive", "--format", "csv"], capsys)
    assert out.splitlines() == ["value,n", "2.0,3"]


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_gen_round_trip(tmp_path, capsys, fmt):
    path = tmp_path / f"s.{fmt}"
    code, _, _ = run(["gen", "--scheme", "S2", "--n", "300", "--seed", "42", "--format", fmt,
                      "--output", str(path)], capsys)
    assert code == 0
    code, out, _ = run(["gini", "--input", str(path)], capsys)
    expected = gini_fast(generate(SCHEMES["S2"], 300, 42)).value
    assert json.loads(out)["value"] == expected


def test_gini_from_scheme(capsys):
    _, out, _ = run(["gini", "--family", "NormalSum", "--m", "4", "--n", "50", "--seed", "3"], capsys)
    from ustat_assoc import Family, GeneratorScheme
    assert json.loads(out)["value"] == gini_fast(generate(GeneratorScheme(Family.NORMAL_SUM, 4), 50, 3)).value


def test_gen_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        run(["gen", "--scheme", "S6", "--n", "100", "--seed", "7", "--output", str(p)], capsys)
    assert a.read_bytes() == b.read_bytes()
    vals = Sample.from_csv(a.read_text()).values
    assert np.array_equal(vals, generate(SCHEMES["S6"], 100, 7).values)


def test_estimate_sigma(capsys):
    code, out, _ = run(["estimate-sigma", "--scheme", "S1", "--n", "1000", "--seed", "1"], capsys)
    est = json.loads(out)
    assert code == 0 and est["ell"] == 63 and est["variant"] == "plug-in"
    _, out, _ = run(["estimate-sigma", "--scheme", "S1", "--n", "1000", "--seed", "1", "--ell", "10",
                     "--block-range", "simulation"], capsys)
    assert json.loads(out)["ell"] == 10


def test_variation_hk(tmp_path, capsys):
    grid = GridFunction.uniform(lambda x, y: np.abs(x - y), [0, 0], [1, 1], 65)
    path = tmp_path / "grid.csv"
    path.write_text(grid.to_csv())
    code, out, _ = run(["variation", "--input", str(path), "--hk"], capsys)
    rep = json.loads(out)
    assert code == 0 and abs(rep["hk"] - 4.0) < 0.02 and rep["per_face"]["1"] == pytest.approx(1.0)
    _, out, _ = run(["variation", "--input", str(path)], capsys)
    assert json.loads(out)["hk"] is None


def test_jointdf(capsys):
    code, out, _ = run(["jointdf", "--scheme", "S4", "--n", "500", "--seed", "2", "--lag", "2",
                        "--grid-s", "-1", "0", "1", "--grid-t", "0"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 3
    vals = [float(r["value"]) for r in rows]
    assert vals == sorted(vals)


def test_table_row(capsys):
    code, out, err = run(["table", "--scheme", "S1", "--n", "100", "200", "--reps", "50",
                          "--seed", "42", "--workers", "1"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["n"] for r in rows] == ["100", "200"]
    assert "n=100" in err
    _, out2, _ = run(["table", "--scheme", "S1", "--n", "100", "200", "--reps", "50",
                      "--seed", "42", "--workers", "2"], capsys)
    assert out == out2


def test_clt_and_sup_checks(capsys):
    code, out, _ = run(["clt-check", "--scheme", "S1", "--n", "100", "--reps", "50", "--seed", "1",
                        "--workers", "1"], capsys)
    assert code == 0 and json.loads(out)[0]["r"] == 50
    code, out, _ = run(["sup-check", "--scheme", "S1", "--seed", "1", "--n", "100", "200"], capsys)
    assert code == 0 and [p["n"] for p in json.loads(out)] == [100, 200]


def test_requires_oracle_is_runtime_error(capsys):
    code, _, err = run(["clt-check", "--scheme", "S4", "--n", "100", "--reps", "5", "--seed", "1",
                        "--oracle", "table"], capsys)
    assert code == 1 and "sigma_U" in err


@pytest.mark.parametrize("argv", [
    ["gen", "--scheme", "S9", "--n", "5", "--seed", "1"],
    ["gen", "--scheme", "S1", "--n", "5"],
    ["table", "--scheme", "S1", "--seed", "1"],
    ["bogus"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_missing_scheme_is_usage_error(capsys):
    assert main(["gen", "--n", "5", "--seed", "1"]) == 2


def test_runtime_errors_exit_1(tmp_path, capsys):
    assert main(["gen", "--scheme", "S1", "--n", "1", "--seed", "1"]) == 1
    assert main(["gini", "--input", str(tmp_path / "missing.csv")]) == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y,value\n0,0,1\n1,1,2\n0,1,3\n")
    assert main(["variation", "--input", str(bad)]) == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ustat_assoc", "gen", "--scheme", "S1", "--n", "3",
                          "--seed", "0"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.splitlines()[0] == "x"

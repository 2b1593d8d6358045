import json
import subprocess
import sys

import pytest

from janardan_gw.cli import OUTDIR_ENV, main
from janardan_gw.report import build_table, parse_csv


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_extinction_default_and_r_compatible_solver(capsys):
    code, out, _ = run(["extinction", "--lambda", "2", "--mu", "1.9999"], capsys)
    assert code == 0 and out == "0.2031927\n"
    code, out, _ = run(["extinction", "--lambda", "2", "--mu", "1.9999", "--solver", "uniroot"], capsys)
    assert code == 0 and out == "0.2032077\n"
    code, out, _ = run(["extinction", "--poisson", "2", "--precision", "10"], capsys)
    assert out == "0.2031878700\n"
    code, out, _ = run(["extinction", "--lambda", "0.8", "--mu", "0.4", "--format", "json"], capsys)
    assert json.loads(out) == {"extinction_probability": 1.0, "solver": "bisect"}


@pytest.mark.parametrize("argv", [
    [],
    ["extinction"],
    ["extinction", "--lambda", "2"],
    ["extinction", "--poisson", "2", "--mu", "1"],
    ["extinction", "--poisson", "2", "--lambda", "3", "--mu", "1"],
    ["extinction", "--poisson", "2", "--bogus"],
    ["frobnicate"],
    ["tables"],
    ["dist", "--lambda", "x", "--mu", "1"],
])
def test_usage_errors_exit_1(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 1
    assert out == ""
    assert len(err.strip().splitlines()) == 1


@pytest.mark.parametrize("argv", [
    ["extinction", "--lambda", "2", "--mu", "3"],
    ["classify", "--lambda", "-1", "--mu", "0.5"],
    ["extinction", "--poisson", "2", "--tol", "0.1"],
    ["sample", "--poisson", "2", "-n", "0"],
    ["estimate", "--input", "/nonexistent/obs.txt"],
])
def test_domain_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert err.startswith("error:")


def test_numerical_failure_exits_3(capsys):
    # supercritical by a hair: the root sits above the bisection bracket
    code, _, err = run(["extinction", "--lambda", "2", "--mu", "0.2384058441"], capsys)
    assert code == 3
    assert "does not change sign" in err


def test_estimate_on_all_zeros_is_degenerate(tmp_path, capsys):
    obs = tmp_path / "obs.txt"
    obs.write_text("0\n" * 1000)
    code, _, err = run(["estimate", "--input", str(obs)], capsys)
    assert code == 2
    assert "degenerate" in err and "mean 0" in err


def test_sample_then_estimate(tmp_path, capsys):
    obs = tmp_path / "obs.txt"
    assert main(["sample", "--lambda", "2", "--mu", "1", "-n", "2000", "--seed", "7", "--out", str(obs)]) == 0
    assert len(obs.read_text().splitlines()) == 2000
    code, out, _ = run(["estimate", "--input", str(obs), "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["n"] == 2000
    assert abs(doc["lambda_hat"] - 2) < 0.2 and doc["admissible"]


def test_estimate_from_frequency_csv(tmp_path, capsys):
    freq = tmp_path / "freq.csv"
    freq.write_text("class,count\n0,136\n1,464\n2,250\n3,100\n4,50\n")
    code, out, _ = run(["estimate", "--input", str(freq), "--from-freq"], capsys)
    assert code == 0
    assert "lambda_hat: 1.9951004" in out
    assert "admissible: True" in out


def test_dist_classify_curve_ext_time(capsys):
    code, out, _ = run(["dist", "--lambda", "2", "--mu", "1", "--max-m", "3", "--format", "csv"], capsys)
    header, rows = parse_csv(out)
    assert code == 0 and header == ["m", "pmf", "cdf"] and len(rows) == 4
    code, out, _ = run(["classify", "--lambda", "2", "--mu", "1"], capsys)
    assert "regime: supercritical" in out and "threshold_mu: 0.2384058" in out
    code, out, _ = run(["curve", "--lambda", "2", "--mu", "1", "--generations", "20", "--format", "csv"], capsys)
    _, rows = parse_csv(out)
    assert abs(rows[-1][1] - 0.3060074) < 5e-8
    code, out, _ = run(["ext-time", "--poisson", "0.8", "--generations", "20", "--format", "csv"], capsys)
    _, rows = parse_csv(out)
    assert f"{rows[-1][1]:.2e}" == "9.44e-04"


def test_simulate_summary(capsys):
    argv = ["simulate", "--poisson", "2", "--traces", "2000", "--max-gen", "50", "--seed", "3", "--format", "json"]
    code, out, _ = run(argv, capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["extinct"] + doc["truncated"] + doc["surviving"] == 2000
    assert abs(doc["extinct_fraction"] - 0.2032) < 0.05
    assert run(argv, capsys)[1] == out


def test_tables_all_writes_files(tmp_path, capsys):
    code, out, _ = run(["tables", "--all", "--format", "csv", "--out", str(tmp_path)], capsys)
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["T1.csv", "T2.csv", "T3.csv", "T4.csv", "T5.csv", "figure1.csv"]
    for tid in ("T1", "T2", "T3", "T4"):
        assert (tmp_path / f"{tid}.csv").read_text() == build_table(tid).to_csv()


def test_tables_deterministic_output(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["tables", "--all", "--figure", "--svg", "--seed", "11", "--out", str(d)]) == 0
    capsys.readouterr()
    for f in a.iterdir():
        assert f.read_bytes() == (b / f.name).read_bytes()


def test_tables_env_outdir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUTDIR_ENV, str(tmp_path))
    code, _, _ = run(["tables", "--id", "T2", "--format", "json"], capsys)
    assert code == 0
    assert json.loads((tmp_path / "T2.json").read_text())["id"] == "T2"


def test_tables_stdout(monkeypatch, capsys):
    monkeypatch.delenv(OUTDIR_ENV, raising=False)
    code, out, _ = run(["tables", "--id", "T1", "--format", "text"], capsys)
    assert code == 0 and "0.2032077" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "janardan_gw", "extinction", "--poisson", "8"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout == "0.0003364\n"

import csv
import io
import json
import subprocess
import sys

import pytest

from simperc import __version__
from simperc.cli import main

REGIME = ["--lambda-p", "50", "--lambda-s", "50", "--dt", "0.18", "--dtt", "0.22", "--df", "0.05", "--window", "2"]


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    assert text.endswith("\r\n")
    return list(csv.DictReader(io.StringIO(text, newline="")))


def test_percolate_reference_regime(capsys):
    code, out, _ = run(["percolate", *REGIME, "--trials", "200", "--seed", "7"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["tool"] == "simperc" and doc["version"] == __version__ and doc["master_seed"] == 7
    assert doc["config"]["lambda_p"] == 50.0 and doc["config"]["dt"] == 0.18
    rows = {r["network"]: r for r in doc["rows"]}
    assert set(rows) == {"primary", "secondary", "both"}
    assert rows["both"]["probability"] <= min(rows["primary"]["probability"], rows["secondary"]["probability"])
    assert 0 < rows["primary"]["probability"] < 1


def test_percolate_lambda_s_zero(capsys):
    argv = ["percolate", *REGIME, "--trials", "30", "--seed", "1"]
    argv[argv.index("--lambda-s") + 1] = "0"
    code, out, _ = run(argv, capsys)
    rows = {r["network"]: r for r in json.loads(out)["rows"]}
    assert code == 0 and rows["secondary"]["probability"] == 0.0


def test_percolate_repeat_is_byte_identical(capsys):
    argv = ["percolate", *REGIME, "--trials", "25", "--seed", "3", "--format", "csv"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_bounds_examples(capsys):
    code, out, _ = run(["bounds", "--dt", "0.18", "--dtt", "0.08", "--df", "0.05", "--lambda-p", "50", "--lambda-s", "500"], capsys)
    row = json.loads(out)["rows"][0]
    assert code == 0
    assert row["lambda_p_max_vacancy"] == pytest.approx(398.9, abs=0.05)
    assert row["lambda_p_max_site"] > 0 and row["lambda_c_unit"] == 1.436
    code, out, _ = run(["bounds", "--dt", "0.18", "--dtt", "0.2", "--df", "0.05", "--lambda-p", "50", "--lambda-s", "500"], capsys)
    assert json.loads(out)["rows"][0]["lambda_p_max_vacancy"] == "not-applicable"


def test_bounds_json_csv_equivalent(capsys):
    base = ["bounds", "--dt", "0.18", "--dtt", "0.2", "--df", "0.05", "--lambda-p", "50", "--lambda-s", "500"]
    _, js, _ = run(base + ["--format", "json"], capsys)
    _, cs, _ = run(base + ["--format", "csv"], capsys)
    jrow = json.loads(js)["rows"][0]
    crow = parse_csv(cs)[0]
    for k, v in jrow.items():
        c = crow[k]
        if isinstance(v, bool):
            assert c == ("true" if v else "false")
        elif isinstance(v, (int, float)):
            assert float(c) == v  # 17 significant digits round-trip exactly
        else:
            assert c == v
    assert crow["tool"] == "simperc" and crow["version"] == __version__
    assert json.loads(crow["config"])["df"] == 0.05


def test_sweep_rows_and_overlay(capsys):
    argv = ["sweep", "--dt", "0.18", "--dtt", "0.2", "--df", "0.03", "--window", "1",
            "--lp-min", "40", "--lp-max", "60", "--lp-steps", "3",
            "--ls-min", "100", "--ls-max", "300", "--ls-steps", "2",
            "--trials", "10", "--seed", "2", "--format", "csv"]
    code, out, _ = run(argv, capsys)
    rows = parse_csv(out)
    assert code == 0 and len(rows) == 6
    assert [(float(r["lambda_p"]), float(r["lambda_s"])) for r in rows] == [
        (a, b) for a in (40.0, 50.0, 60.0) for b in (100.0, 300.0)
    ]
    _, bj, _ = run(["bounds", "--dt", "0.18", "--dtt", "0.2", "--df", "0.03", "--lambda-p", "50",
                    "--lambda-s", "300", "--format", "csv"], capsys)
    b = parse_csv(bj)[0]
    r = rows[3]
    for k in ("lambda_p_max_site", "p_tilde_4", "lambda_p_max_sufficient_simple", "k_8"):
        assert r["bound_" + k] == b[k]


def test_sweep_single_point(capsys):
    argv = ["sweep", "--dt", "0.18", "--dtt", "0.2", "--df", "0.03", "--window", "1",
            "--lp-min", "40", "--lp-max", "40", "--lp-steps", "1",
            "--ls-min", "100", "--ls-max", "100", "--ls-steps", "1", "--trials", "5", "--format", "csv"]
    code, out, _ = run(argv, capsys)
    assert code == 0 and out.count("\r\n") == 2


def test_pdf_check_command(capsys):
    code, out, _ = run(["pdf-check", "--ell", "0.1", "7.3", "--samples", "100000", "--seed", "4"], capsys)
    rows = json.loads(out)["rows"]
    assert code == 0 and [r["ell"] for r in rows] == [0.1, 7.3]
    assert all(r["ks_statistic"] < 0.01 and r["normalization_residual"] < 1e-9 for r in rows)


def test_lambda_c_command_small(capsys):
    code, out, _ = run(["lambda-c", "--diameter", "1", "--heights", "4", "8", "--trials", "20", "--seed", "1"], capsys)
    rows = json.loads(out)["rows"]
    assert code == 0 and len(rows) == 2 and sum(r["selected"] for r in rows) == 1


@pytest.mark.parametrize("argv", [
    ["percolate"],
    ["percolate", *REGIME, "--trials", "0"],
    ["percolate", *REGIME, "--dt", "-1"],
    ["bounds", "--dt", "0.18", "--dtt", "0.2", "--df", "0.05", "--lambda-p", "5", "--lambda-s", "5", "--p8", "1.5"],
    ["sweep", "--dt", "0.18", "--dtt", "0.2", "--df", "0.03", "--window", "1", "--lp-min", "5", "--lp-max", "1",
     "--lp-steps", "2", "--ls-min", "1", "--ls-max", "2", "--ls-steps", "2"],
    ["lambda-c", "--heights", "10"],
    ["nonsense"],
    ["--config", "/nonexistent/file.cfg", "bounds"],
])
def test_configuration_errors_exit_2(argv, capsys):
    code, _, _ = run(argv, capsys)
    assert code == 2


def test_failed_guard_zone_exits_3(capsys):
    code, out, err = run(["guardzone", "--dt", "0.18", "--dtt", "0.2", "--lambda-p", "60", "--lambda-s", "0",
                          "--trials", "50", "--seed", "1"], capsys)
    assert code == 3 and "stayed above" in err
    assert json.loads(out)["rows"][0]["certified"] is False


def test_runtime_error_exits_3(capsys, monkeypatch):
    from simperc import experiments

    def boom(*a, **k):
        raise RuntimeError("kaboom")

    monkeypatch.setattr(experiments, "estimate_simultaneous", boom)
    code, _, err = run(["percolate", *REGIME, "--trials", "2"], capsys)
    assert code == 3 and "kaboom" in err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# reference regime\nlambda_p = 50\nlambda-s = 50\ndt = 0.18\ndtt = 0.22\ndf = 0.05\nwindow = 2\ntrials = 5\nseed = 11\n")
    code, out, _ = run(["--config", str(cfg), "percolate"], capsys)
    assert code == 0 and json.loads(out)["config"]["trials"] == 5
    code, out, _ = run(["--config", str(cfg), "percolate", "--trials", "7"], capsys)
    doc = json.loads(out)
    assert doc["config"]["trials"] == 7 and doc["master_seed"] == 11
    bad = tmp_path / "bad.cfg"
    bad.write_text("trials 5\n")
    assert run(["--config", str(bad), "percolate"], capsys)[0] == 2


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("SIMPERC_SEED", "321")
    _, out, _ = run(["percolate", *REGIME, "--trials", "3"], capsys)
    assert json.loads(out)["master_seed"] == 321
    monkeypatch.setenv("SIMPERC_SEED", "xyz")
    assert run(["percolate", *REGIME, "--trials", "3"], capsys)[0] == 2


def test_emitted_config_reproduces_output(tmp_path, capsys):
    out1 = tmp_path / "a.json"
    run(["percolate", *REGIME, "--trials", "12", "--seed", "5", "--output", str(out1)], capsys)
    cfg = json.loads(out1.read_text())["config"]
    lines = [f"{k} = {v}" for k, v in cfg.items() if k != "command" and v != "not-applicable"]
    path = tmp_path / "replay.cfg"
    path.write_text("\n".join(lines) + "\n")
    out2 = tmp_path / "b.json"
    run(["--config", str(path), "percolate", "--output", str(out2)], capsys)
    assert out1.read_bytes() == out2.read_bytes()


def test_help_names_seed_variable():
    res = subprocess.run([sys.executable, "-m", "simperc", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "SIMPERC_SEED" in res.stdout


def test_module_entry_point(tmp_path):
    out = tmp_path / "b.csv"
    res = subprocess.run(
        [sys.executable, "-m", "simperc", "bounds", "--dt", "1", "--dtt", "1", "--df", "0.002",
         "--lambda-p", "3", "--lambda-s", "100", "--format", "csv", "--output", str(out)],
        capture_output=True,
    )
    assert res.returncode == 0
    assert out.read_bytes() == res.stdout

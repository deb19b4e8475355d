import json
import subprocess
import sys

import pytest

from szego_lab.cli import main
from szego_lab.commands import run
from szego_lab.config import parse_config

BASE = """\
grid: 1024
degree: 24
weight: {kind: constant, value: 1}
exterior: [[2, 0, 1]]
interior: [[0.3, 0, 0.5]]
options: {trials: 100, weights: 2}
"""


@pytest.fixture
def config_file(tmp_path):
    p = tmp_path / "run.yaml"
    p.write_text(BASE)
    return p


def test_tau_on_unperturbed_measure():
    cfg = parse_config("grid: 256\ndegree: 10\nweight: {kind: constant, value: 1}\n")
    rep = run("tau", cfg)
    assert rep.exit_code == 0
    assert all(r["tau"] == 1.0 and r["gap"] == 0.0 for r in rep.tables["tau"])


def test_koosis_flat_weight():
    cfg = parse_config("grid: 1024\nweight: {kind: constant, value: 1}\noptions: {trials: 50}\n")
    rep = run("koosis", cfg)
    assert rep.exit_code == 0
    assert rep.summary["max_conjugation_ratio"] == pytest.approx(1.0, abs=1e-12)


def test_koosis_weight_below_one_is_config_error():
    cfg = parse_config("grid: 256\nweight: {kind: constant, value: 0.5}\n")
    rep = run("koosis", cfg)
    assert rep.exit_code == 2 and rep.error["module"] == "szego_lab.config"


def test_invalid_measure_fails_checks():
    cfg = parse_config("grid: 256\nweight: {kind: constant, value: 1}\nexterior: [[0.5, 0, 1]]\n")
    assert run("validate", cfg).exit_code == 1
    rep = run("tau", cfg)
    assert rep.exit_code == 1
    failed = [c["name"] for c in rep.checks if not c["passed"]]
    assert failed == ["measure: exterior outside disk"]
    assert rep.summary["validation"] == ["exterior location inside disk"]


def test_precision_error_is_reported():
    cfg = parse_config("grid: 256\ndegree: 120\nprecision: 64\n"
                       "weight: {kind: constant, value: 1}\nexterior: [[3, 0, 1]]\n")
    rep = run("tau", cfg)
    assert rep.exit_code == 1 and rep.error["type"] == "PrecisionRangeError"
    assert rep.error["module"] == "szego_lab.ortho"


@pytest.mark.parametrize("command", ["validate", "tau", "corollary", "qn", "chain", "koosis"])
def test_commands_write_outputs(command, config_file, tmp_path):
    out = tmp_path / command
    assert main([command, "--config", str(config_file), "--out", str(out)]) == 0
    data = json.loads((out / "report.json").read_text())
    assert data["command"] == command and data["passed"]
    for name in data["tables"]:
        assert (out / f"{name}.csv").exists()
    figures = {"tau": "tau.png", "corollary": "corollary.png", "qn": "qn.png",
               "chain": "qn.png", "koosis": "koosis.png"}
    if command in figures:
        assert (out / figures[command]).stat().st_size > 0


def test_outputs_are_byte_identical(config_file, tmp_path):
    for d in ("a", "b"):
        assert main(["chain", "--config", str(config_file), "--seed", "5",
                     "--out", str(tmp_path / d)]) == 0
    for name in ("report.json", "qn.csv", "qn.png"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_jobs_do_not_change_results(config_file, tmp_path):
    main(["koosis", "--config", str(config_file), "--out", str(tmp_path / "one"), "--no-figures"])
    main(["koosis", "--config", str(config_file), "--out", str(tmp_path / "two"),
          "--jobs", "2", "--no-figures"])
    assert ((tmp_path / "one" / "report.json").read_bytes()
            == (tmp_path / "two" / "report.json").read_bytes())
    assert not (tmp_path / "one" / "koosis.png").exists()


def test_config_errors_exit_two(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text("weight:\n  kind: constant\n  value: -1\nfoo: 1\n")
    assert main(["tau", "--config", str(p)]) == 2
    err = capsys.readouterr().err
    assert "line 3: weight.value" in err and "'foo'" in err
    assert main(["tau"]) == 2
    assert main(["tau", "--config", str(tmp_path / "missing.yaml")]) == 2


def test_stdout_json(config_file, capsys):
    assert main(["validate", "--config", str(config_file)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["summary"]["ok"] and data["passed"]


@pytest.mark.slow
def test_selftest_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "szego_lab.cli", "selftest",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    rows = json.loads((tmp_path / "report.json").read_text())["tables"]["selftest"]
    assert rows and all(r["passed"] for r in rows)

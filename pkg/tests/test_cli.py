from __future__ import annotations

import json
import math
import subprocess
import sys

import pytest

from bose_lhy.cli import run


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def numbers_are_wrapped(node, path="result"):
    if isinstance(node, dict):
        if set(node) == {"value", "tol"}:
            return True
        return all(numbers_are_wrapped(v, f"{path}.{k}") for k, v in node.items())
    if isinstance(node, list):
        return all(numbers_are_wrapped(v, path) for v in node)
    return not isinstance(node, (int, float)) or isinstance(node, bool)


def test_lhy_defaults(capsys):
    code, out, _ = invoke(capsys, "lhy")
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == 1
    assert doc["result"]["I"]["value"] == pytest.approx(9.4781503, abs=1e-7)
    assert doc["result"]["coefficient"]["value"] == pytest.approx(128 / (15 * math.sqrt(math.pi)), rel=1e-15)
    assert numbers_are_wrapped(doc["result"]) and numbers_are_wrapped(doc["config"])


def test_lhy_csv(capsys):
    code, out, _ = invoke(capsys, "lhy", "--rho-a3-list", "1e-6,1e-10", "--out", "csv")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "rho_a3,e_over_4pi_rho2a,lhy_term"
    assert len(lines) == 3


def test_scattering_uniform_ball(capsys):
    code, out, _ = invoke(capsys, "scattering", "--potential", "uniform-ball:2,1")
    doc = json.loads(out)
    assert code == 0
    assert doc["result"]["a"]["value"] == pytest.approx(0.2384058, abs=1e-7)
    assert doc["result"]["a"]["tol"] > 0


def test_scattering_study_csv(capsys):
    code, out, _ = invoke(capsys, "scattering", "--potential", "tent:1,1", "--R-list", "4,8", "--out", "csv")
    assert code == 0
    assert out.splitlines()[0].startswith("R,a_ode,born_sum")


def test_bogolubov_zero_trials(capsys):
    code, out, _ = invoke(capsys, "bogolubov-verify", "--trials", "0")
    assert code == 0
    assert json.loads(out)["result"]["trials"] == []


def test_bogolubov_and_matrix_are_byte_identical(capsys, monkeypatch):
    for argv in (["bogolubov-verify", "--trials", "20", "--seed", "5"],
                 ["matrix-localize", "--trials", "20", "--seed", "5", "--n", "20"]):
        _, first, _ = invoke(capsys, *argv)
        monkeypatch.setenv("BOSE_LHY_THREADS", "3")
        _, second, _ = invoke(capsys, *argv)
        monkeypatch.delenv("BOSE_LHY_THREADS")
        assert first == second


def test_localize_check(capsys):
    code, out, _ = invoke(capsys, "localize-check", "--M", "2", "--s", "0.2", "--grid", "16", "--points", "5")
    doc = json.loads(out)
    assert code == 0
    assert all(c["passed"] for c in doc["checks"])
    assert {c["name"] for c in doc["checks"]} >= {"partition_unit", "big_box_self_energy", "F_at_zero"}


def test_regime_reports_failures_with_exit_2(capsys):
    code, out, err = invoke(capsys, "regime")
    assert code == 2
    assert "condition_margins" in err
    assert json.loads(out)["result"]["flags"]["scale_chain"] is True
    code, _, _ = invoke(capsys, "regime", "--no-fail")
    assert code == 0


def test_regime_extreme_density_passes(capsys):
    code, out, _ = invoke(capsys, "regime", "--rho-a3-list", "1e-12000,1e-14000,1e-16000")
    assert code == 0, out
    assert json.loads(out)["passed"] is True


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"subcommand": "scattering", "potential": {"family": "uniform-ball",
                                                                       "params": {"amplitude": 2}, "range": 1}}))
    code, out, _ = invoke(capsys, "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["result"]["a"]["value"] == pytest.approx(0.2384058, abs=1e-7)


def test_output_path(tmp_path, capsys):
    path = tmp_path / "lhy.json"
    code, out, _ = invoke(capsys, "lhy", "--output", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["subcommand"] == "lhy"


@pytest.mark.parametrize("argv", [
    [], ["nope"], ["lhy", "--bogus"], ["scattering", "--potential", "weird:1"],
    ["bogolubov-verify", "--out", "csv"], ["lhy", "--config", "/nonexistent.json"],
    ["regime", "--rho-a3-list", "abc"],
])
def test_usage_errors(capsys, argv):
    code, _, _ = invoke(capsys, *argv)
    assert code == 1


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"subcommand": "lhy", "colour": "blue"}))
    assert invoke(capsys, "--config", str(cfg))[0] == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "bose_lhy", "bogolubov-verify", "--trials", "0"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["schema_version"] == 1


def test_help_lists_csv_columns(capsys):
    code, out, _ = invoke(capsys, "--help")
    assert code == 0
    assert "CSV columns" in out

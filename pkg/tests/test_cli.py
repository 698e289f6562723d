from __future__ import annotations

import json
import math
import subprocess
import sys

import pytest

from cornerbound import cli


def run_json(capsys, *argv):
    code = cli.run(["--json", *argv])
    out = json.loads(capsys.readouterr().out)
    return code, out


def test_bound_simplex(capsys):
    code, out = run_json(capsys, "bound", "--config", "simplex", "--k", "2", "--norm", "euclidean")
    assert code == 0
    assert out["outputs"]["base"]["base"] == pytest.approx(1.0742, abs=5e-4)
    assert out["provenance"]["base"] == "Theorem 1.4"
    assert out["status"]["state"] == "ok"


def test_constants_table(capsys):
    code, out = run_json(capsys, "constants")
    assert code == 0
    bases = {k: v["base"] for k, v in out["outputs"].items() if isinstance(v, dict)}
    assert bases["psi2"] == pytest.approx(1.239, abs=1e-3)
    assert bases["psi1"] == pytest.approx(1.366, abs=1e-3)
    assert bases["psi"] == pytest.approx(1.207, abs=1e-3)
    for name, value in out["outputs"].items():
        assert name in out["provenance"]
        if isinstance(value, dict) and "log_base" in value:
            assert abs(value["base"] - math.exp(value["log_base"])) <= 1e-12


def test_verify_tree_concat(capsys):
    code, out = run_json(capsys, "verify", "--suite", "tree-concat", "--max-vertices", "4", "--trials", "100")
    assert code == 0
    assert out["inputs"]["seed"] == 0 and out["inputs"]["budget"] > 0
    assert all(v["violations"] == 0 for v in out["outputs"].values())


def test_verify_family(capsys, tmp_path):
    path = tmp_path / "fam.txt"
    path.write_text("n=4\n6\nc\na\n")
    code, out = run_json(capsys, "verify", "--suite", "family", "--trials", "300", "--family", str(path))
    assert code == 0
    assert out["outputs"]["family file"]["weak sunflower"] == [0, 1, 2]


def test_exit_codes(capsys):
    assert cli.run(["bound", "--config", "sunflower", "--k", "2"]) == cli.EXIT_DOMAIN
    assert cli.run(["bound", "--config", "bogus"]) == cli.EXIT_USAGE
    assert cli.run(["nonsense"]) == cli.EXIT_USAGE
    assert cli.run(["bound", "--config", "sunflower"]) == cli.EXIT_USAGE
    assert cli.run(["embed", "--triangle", "1,1,1.5"]) == cli.EXIT_DOMAIN
    assert cli.run(["prime-split", "--target", "22"]) == cli.EXIT_DOMAIN
    capsys.readouterr()


def test_certification_exit(monkeypatch, capsys):
    from cornerbound import tree_concat

    def broken(*args, **kwargs):
        report = tree_concat.TreeLemmaReport()
        report.violations.append("forced")
        return report

    monkeypatch.setattr(tree_concat, "certify_tree_lemma", broken)
    code, out = run_json(capsys, "verify", "--suite", "tree-concat", "--trials", "2")
    assert code == cli.EXIT_CERT
    assert out["status"]["kind"] == "certification"


def test_error_status_in_json(capsys):
    code, out = run_json(capsys, "bound", "--config", "intersection", "--rho", "0.5", "--sigma", "0.25", "--c-class", "2")
    assert code == 1
    assert out["status"]["state"] == "error" and "Goldbach" in out["status"]["message"]


def test_other_subcommands(capsys):
    code, out = run_json(capsys, "prime-split", "--target", "35")
    assert code == 0 and out["outputs"]["parts"] == [11, 11, 13]
    code, out = run_json(capsys, "prime-split", "--target", "101", "--proportions", "0.5,0.3,0.2")
    assert code == 0 and sum(out["outputs"]["parts"]) == 101
    code, out = run_json(capsys, "compose", "--c1", "2", "--eps1", "0.2", "--m1", "2", "--c2", "2", "--eps2", "0.2", "--m2", "2")
    assert code == 0 and out["outputs"]["eta"] == pytest.approx(0.17236, abs=1e-5)
    code, out = run_json(capsys, "embed", "--triangle", "3,4,5")
    assert code == 0 and out["outputs"]["scalings"] == [3.0, 4.0]
    code, out = run_json(capsys, "embed", "--simplex", "2", "--norm", "manhattan")
    assert code == 0 and out["outputs"]["side"] == 1
    code, out = run_json(capsys, "bound", "--config", "clique", "--rho", "0.5", "--sigma", "0.3535533905932738", "--k", "3")
    assert code == 0 and out["outputs"]["base"]["base"] == pytest.approx(1.8784, abs=1e-4)


def test_optimize_and_plan_file(capsys, tmp_path):
    code, out = run_json(capsys, "optimize-partition", "--starts", "4", "--seed", "1")
    assert code == 0 and out["outputs"]["optimized rate"]["base"] <= out["outputs"]["symmetric rate"]["base"]
    plan = tmp_path / "plan.json"
    plan.write_text(json.dumps({"blocks": [{"nu": 1 / 3, "rho_share": 1 / 6, "sigma_share": 0.05}] * 3}))
    code, out = run_json(capsys, "optimize-partition", "--plan", str(plan))
    assert code == 0 and out["outputs"]["plan rate"]["base"] == pytest.approx(1.970, abs=5e-4)


def test_config_file_and_override(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"verify": {"trials": 7, "seed": 4}}))
    monkeypatch.setenv(cli.CONFIG_ENV, str(cfg))
    code, out = run_json(capsys, "verify", "--suite", "family", "--seed", "9")
    assert code == 0
    assert out["inputs"]["trials"] == 7 and out["inputs"]["seed"] == 9
    cfg.write_text(json.dumps({"verify": {"nope": 1}}))
    assert cli.run(["verify"]) == cli.EXIT_USAGE
    capsys.readouterr()


def test_deterministic_output(capsys):
    argv = ["verify", "--suite", "all", "--trials", "20", "--seed", "5"]
    first = run_json(capsys, *argv)
    second = run_json(capsys, *argv)
    assert first == second


def test_table_output_has_twelve_digits(capsys):
    assert cli.run(["bound", "--config", "right_triangle"]) == 0
    text = capsys.readouterr().out
    assert "1.11335831641" in text and "Theorem 1.5" in text


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cornerbound", "--json", "bound", "--config", "sunflower", "--k", "3"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["outputs"]["base"]["base"] == pytest.approx(1.8784, abs=1e-4)

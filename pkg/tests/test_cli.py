import json
import os
import subprocess
import sys

import pytest

from rwb.cli import main


@pytest.fixture
def files(tmp_path):
    (tmp_path / "empty.rth").write_text("sort A;\nrel R(A, A);\n")
    (tmp_path / "bad.rth").write_text("sort A;\nrel R(A A);\n")
    (tmp_path / "chain.json").write_text("[[1, 1], [0, 1]]")
    return tmp_path


def test_chase_transitivity(capsys):
    assert main(["chase", "--theory", "transitivity", "--formula", "[x:A, y:A, z:A] R(x, y) & R(y, z)"]) == 0
    out = capsys.readouterr().out
    assert "Terminated" in out and "A = {d0, d1, d2}" in out


def test_chase_budget_zero(files, capsys):
    assert main(["chase", "--theory", str(files / "empty.rth"), "--formula", "[x:A] true", "--budget", "0"]) == 0
    assert "Terminated" in capsys.readouterr().out


def test_chase_budget_exhausted_prints_model(files, capsys):
    out_json = files / "r.json"
    code = main(["chase", "--theory", "successor", "--formula", "[x:A, y:A] R(x, y)", "--budget", "4",
                 "--json", str(out_json)])
    assert code == 3
    assert "R = {" in capsys.readouterr().out
    data = json.loads(out_json.read_text())
    assert data["result"]["status"] == "BudgetExhausted(4)" and data["schema"] == "rwb-report/1"


def test_malformed_theory(files, capsys):
    assert main(["chase", "--theory", str(files / "bad.rth"), "--formula", "[x:A] true"]) == 2
    assert "line 2" in capsys.readouterr().err


def test_malformed_formula(capsys):
    assert main(["chase", "--theory", "transitivity", "--formula", "[x:A] R(x"]) == 2
    assert main(["entail", "--theory", "transitivity", "--sequent", "[x:A] Q(x) |- true"]) == 2
    assert main(["chase", "--theory", "no-such-theory", "--formula", "[x:A] true"]) == 2


def test_entail_exit_codes(files, capsys):
    seq = "[x:A, y:A, z:A, w:A] R(x, y) & R(y, z) & R(z, w) |- R(x, w)"
    assert main(["entail", "--theory", "transitivity", "--sequent", seq]) == 0
    assert main(["entail", "--theory", str(files / "empty.rth"), "--sequent", "[x:A, y:A] R(x, y) |- R(y, x)"]) == 1
    assert "countermodel" in capsys.readouterr().out
    assert main(["entail", "--theory", "transitivity", "--sequent", "[x:A] R(x, x) |- R(x, x)"]) == 0
    assert main(["entail", "--theory", "successor", "--sequent", "[x:A, y:A] R(x, y) |- R(y, x)",
                 "--budget", "20"]) == 4


def test_env_budget(monkeypatch, capsys):
    monkeypatch.setenv("RWB_BUDGET", "3")
    assert main(["chase", "--theory", "successor", "--formula", "[x:A, y:A] R(x, y)"]) == 3
    assert "after 3 steps" in capsys.readouterr().out


def test_models(capsys):
    assert main(["models", "--theory", "transitivity", "--max-size", "2", "--quiet"]) == 0
    assert capsys.readouterr().out.startswith("11 models")


def test_stone_commands(files, capsys):
    assert main(["stone", "--max-size", "4"]) == 0
    assert main(["stone", "--input", str(files / "chain.json")]) == 0
    (files / "anti.json").write_text("[[1, 0], [0, 1]]")
    assert main(["stone", "--input", str(files / "anti.json")]) == 2
    (files / "junk.json").write_text("not json")
    assert main(["stone", "--input", str(files / "junk.json")]) == 2


def test_verify_examples(capsys):
    assert main(["verify", "--suite", "stone", "--max-size", "4"]) == 0
    assert main(["verify", "--suite", "colimit", "--stages", "4", "--model-size", "4"]) == 0
    assert main(["verify", "--suite", "nope"]) == 2


def _verify_json(tmp, name, extra_env):
    out = tmp / name
    env = dict(os.environ, **extra_env)
    subprocess.run([sys.executable, "-m", "rwb.cli", "verify", "--suite", "all", "--seed", "42",
                    "--json", str(out)], check=True, env=env, capture_output=True)
    return out.read_bytes()


@pytest.mark.slow
def test_verify_all_is_deterministic(tmp_path):
    a = _verify_json(tmp_path, "a.json", {"PYTHONHASHSEED": "1"})
    b = _verify_json(tmp_path, "b.json", {"PYTHONHASHSEED": "2"})
    assert a == b
    report = json.loads(a)
    assert report["passed"]
    from rwb.suites import SUITES
    assert [s["suite"] for s in report["suites"]] == list(SUITES)

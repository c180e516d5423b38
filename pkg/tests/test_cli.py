import json
import subprocess
import sys
from importlib import resources

import pytest

from storepass import cli
from storepass.cli import INTERNAL, OK, REJECTED, SCHEMA, USAGE, main


def prog(name):
    return str(resources.files("storepass.corpus").joinpath("programs", name))


def run_json(capsys, *argv):
    code = main([*argv, "--format", "json"])
    out = json.loads(capsys.readouterr().out)
    assert out["schema"] == SCHEMA
    assert out["command"] == argv[0]
    return code, out["result"]


def test_check_accepts_and_rejects(capsys):
    code, res = run_json(capsys, "check", prog("m_ok1.ml"))
    assert code == OK and res["status"] == "accepted"
    code, res = run_json(capsys, "check", prog("m_ng1.ml"))
    assert code == REJECTED and res["status"] == "rejected"
    assert res["rule"] == "T-Deref"


def test_malformed_input_is_a_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.ml"
    bad.write_text("let x = in")
    assert main(["check", str(bad)]) == USAGE
    assert "storepass:" in capsys.readouterr().err
    assert main(["check", str(tmp_path / "missing.ml")]) == USAGE
    assert main(["frobnicate"]) == USAGE
    assert main(["run", prog("fail.ml"), "--fuel", "0"]) == USAGE


def test_internal_errors_have_their_own_code(monkeypatch, capsys):
    def boom(cfg):
        raise RuntimeError("kaput")
    monkeypatch.setattr(cli, "cmd_check", boom)
    assert main(["check", prog("m_ok1.ml")]) == INTERNAL
    assert "internal error" in capsys.readouterr().err


def test_translate_writes_a_typed_program(tmp_path, capsys):
    out = tmp_path / "t.ml"
    assert main(["translate", prog("m_ok2.ml"), "-o", str(out)]) == OK
    assert out.read_text().strip()
    capsys.readouterr()
    assert main(["check", str(out), "--calculus", "core"]) == OK
    capsys.readouterr()
    code, res = run_json(capsys, "translate", prog("m_ng2.ml"))
    assert code == REJECTED and res["status"] == "rejected"


def test_run_with_choices_and_env(capsys):
    code, res = run_json(capsys, "run", prog("choice_fail.ml"), "--calculus", "core",
                         "--choices", "true")
    assert code == OK and res["kind"] == "failed" and res["choices"] == ["true"]
    code, res = run_json(capsys, "run", prog("toggle_read.ml"), "--env", "y:ref bool",
                         "--init", "y=true")
    assert code == OK and res["kind"] == "val"


def test_run_trace_needs_small_step_language(capsys):
    assert main(["run", prog("m_ok1.ml"), "--trace"]) == USAGE
    code, res = run_json(capsys, "run", prog("handler_not.ml"), "--calculus", "algeff",
                         "--trace")
    assert code == OK and any("resume" in e for e in res["trace"])


def test_reach_exit_codes(capsys):
    code, res = run_json(capsys, "reach", prog("choice_fail.ml"), "--calculus", "core")
    assert code == REJECTED and res["verdict"] == "fail-reachable"
    code, res = run_json(capsys, "reach", prog("repeat_ref.src.ml"), "--base", "int",
                         "--max-choices", "1", "--translate")
    assert code == OK and res["verdict"] == "no-fail"


def test_difftest(capsys):
    code, res = run_json(capsys, "difftest", prog("inc_after_rec.src.ml"), "--base", "int",
                         "--max-choices", "1")
    assert code == OK and res["verdict"] == "agree" and res["disagreements"] == []


@pytest.mark.parametrize("target", cli.TARGETS)
def test_encode(target, capsys):
    code, res = run_json(capsys, "encode", prog("inc_halt.minsky"), "--target", target)
    assert code == OK and res["target"] == target and res["program"]


def test_corpus_machines(capsys):
    code, res = run_json(capsys, "corpus", "--group", "machine")
    assert code == OK and res["failed"] == []
    assert {r["id"] for r in res["entries"]} >= {"halt_now", "spin"}


def test_generate_is_seeded(capsys):
    code, a = run_json(capsys, "generate", "--seed", "3", "--count", "2", "--size", "20")
    _, b = run_json(capsys, "generate", "--seed", "3", "--count", "2", "--size", "20")
    assert code == OK and a == b and len(a["programs"]) == 2


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "storepass.cli", "check", prog("m_ng2.ml")],
                       capture_output=True, text=True)
    assert r.returncode == REJECTED and r.stdout.startswith("rejected")

"""Tests for the command line front end.

Most tests drive main(argv) in process and read captured stdout; a few
go through a subprocess where environment or worker processes matter.
The exit-code contract: 0 ok, 1 type error, 2 parse error, 3 budget
exhausted, 4 file problem, 5 counterexample found.
"""

import json
import os
import subprocess
import sys

import pytest

from pimodulo.cli import main

BROKEN_THEORY = """\
; simple-type vocabulary with the implication rule's sides swapped
iota : Type
o : Type
eps : o -> Type
imp : o -> o -> o

[X : o, Y : o] eps (imp X Y) --> eps Y -> eps X : Type
"""


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


# --- check ---


def test_check_builtin_examples_pass(capsys):
    code, out = run_cli(capsys, "check", "--theory", "stt", "builtin:stt_basics")
    assert code == 0
    assert "builtin:stt_basics:" in out
    assert all(line.startswith("ok") for line in out.strip().splitlines())


def test_check_reports_type_errors(capsys, tmp_path):
    bad = tmp_path / "bad.tm"
    bad.write_text("|- imp : o\n")
    code, out = run_cli(capsys, "check", "--theory", "stt", str(bad))
    assert code == 1
    assert "type-error" in out


def test_check_reports_parse_errors(capsys, tmp_path):
    mangled = tmp_path / "mangled.tm"
    mangled.write_text("|- (eps p\n")
    code, out = run_cli(capsys, "check", "--theory", "stt", str(mangled))
    assert code == 2
    assert "parse-error" in out


def test_check_reports_missing_files(capsys, tmp_path):
    code, out = run_cli(capsys, "check", "--theory", "stt", str(tmp_path / "absent.tm"))
    assert code == 4
    assert "io-error" in out


def test_check_validates_the_theory_itself(capsys):
    code, out = run_cli(capsys, "check", "--theory", "cc")
    assert code == 0
    lines = out.strip().splitlines()
    # four signature batches and five rules, each reported
    assert len([l for l in lines if l.startswith("ok")]) == len(lines)


# --- normalize ---


def test_normalize_applies_rewrite_rules(capsys):
    code, out = run_cli(capsys, "normalize", "eps (imp p q)")
    assert code == 0
    assert "eps p -> eps q" in out


def test_normalize_in_beta_mode_keeps_rule_redices(capsys):
    code, out = run_cli(capsys, "normalize", "--mode", "beta", "eps (imp p q)")
    assert code == 0
    assert "eps (imp p q)" in out


def test_normalize_traces_each_step(capsys):
    code, out = run_cli(capsys, "normalize", "--trace",
                        "eps (all[o] (\\y : o. imp y y))")
    assert code == 0
    lines = out.strip().splitlines()
    assert any("\tr2\t" in l or "\tr3\t" in l or "\tr4\t" in l for l in lines)
    assert any("\tbeta\t" in l for l in lines)
    assert lines[-1].startswith("ok\tresult")


def test_normalize_reports_exhausted_budgets(capsys):
    code, out = run_cli(capsys, "normalize", "--fuel", "50",
                        "(\\x : Type. x x) (\\x : Type. x x)")
    assert code == 3
    assert "fuel-exhausted" in out


# --- model-check ---


def test_model_check_sweeps_cleanly(capsys):
    code, out = run_cli(capsys, "model-check", "--theory", "stt",
                        "--count", "6", "--pairs", "4", "--subst", "2")
    assert code == 0
    assert "rule r1" in out
    assert "convertible pairs" in out


def test_model_check_finds_the_swapped_rule(capsys, tmp_path):
    path = tmp_path / "broken.th"
    path.write_text(BROKEN_THEORY)
    code, out = run_cli(capsys, "model-check", "--theory", str(path),
                        "--count", "8", "--pairs", "2", "--subst", "1")
    assert code == 5
    assert "counterexample" in out
    assert "algebra:" in out


def test_model_check_json_lines_are_deterministic(capsys):
    argv = ("model-check", "--theory", "stt", "--format", "json-lines",
            "--count", "4", "--pairs", "3", "--subst", "2")
    code1, out1 = run_cli(capsys, *argv)
    code2, out2 = run_cli(capsys, *argv)
    assert (code1, code2) == (0, 0)
    assert out1 == out2
    header = json.loads(out1.splitlines()[0])
    assert header["command"] == "model-check"
    for line in out1.splitlines()[1:]:
        record = json.loads(line)
        assert set(record) == {"detail", "id", "kind", "status"}


def test_model_check_worker_pool_output_matches_serial():
    argv = [sys.executable, "-m", "pimodulo.cli", "model-check", "--theory", "stt",
            "--format", "json-lines", "--count", "4", "--pairs", "3", "--subst", "2"]
    serial = subprocess.run(argv + ["--jobs", "1"], capture_output=True, text=True)
    pooled = subprocess.run(argv + ["--jobs", "2"], capture_output=True, text=True)
    assert serial.returncode == pooled.returncode == 0
    assert serial.stdout == pooled.stdout


# --- consistency-scan ---


def test_consistency_scan_finds_no_proof_of_a_bare_proposition(capsys):
    code, out = run_cli(capsys, "consistency-scan", "--theory", "stt",
                        "--max-size", "5")
    assert code == 0
    assert "no normal inhabitant" in out


def test_consistency_scan_reports_inhabitants(capsys):
    code, out = run_cli(capsys, "consistency-scan", "--theory", "stt",
                        "--target", "x : o |- eps x -> eps x", "--max-size", "6")
    assert code == 5
    assert "inhabitant" in out
    assert ": eps x. " in out


# --- sn-scan ---


def test_sn_scan_certifies_generated_terms(capsys):
    code, out = run_cli(capsys, "sn-scan", "--theory", "stt",
                        "--count", "15", "--max-size", "14")
    assert code == 0
    assert "15 normalizing, 0 unknown" in out


def test_sn_scan_flags_starved_budgets(capsys):
    code, out = run_cli(capsys, "sn-scan", "--theory", "stt", "--count", "8",
                        "--max-size", "14", "--fuel", "0")
    assert code == 3
    assert "8 unknown" in out
    assert "not certified" in out


# --- configuration ---


def test_fuel_environment_default(monkeypatch, capsys):
    monkeypatch.setenv("PIMODULO_FUEL", "12345")
    code, out = run_cli(capsys, "normalize", "--format", "json-lines", "o")
    assert code == 0
    assert json.loads(out.splitlines()[0])["fuel"] == 12345


def test_command_is_required():
    with pytest.raises(SystemExit):
        main([])

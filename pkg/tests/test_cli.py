import json
from pathlib import Path

import pytest

from polybound.cli import main

from conftest import FIXTURES, FIXTURE_NAMES

SCHEMA_PATH = (
    Path(__file__).resolve().parent.parent / "src" / "polybound" / "report_schema.json"
)


def fixture(name: str) -> str:
    return str(FIXTURES / f"{name}.its")


def test_analyze_text(capsys):
    assert main(["analyze", fixture("nested")]) == 0
    out = capsys.readouterr().out
    assert "RB(t0) = 1" in out
    assert "Asymptotic class: O(n^6)" in out
    assert "SB(t0,x4) = x4" in out


def test_analyze_no_twn_exits_two(capsys):
    assert main(["analyze", fixture("nested"), "--no-twn"]) == 2
    out = capsys.readouterr().out
    assert "RB(t3) = ω" in out


def test_analyze_no_ranking_uses_twn(capsys):
    assert main(["analyze", fixture("countdown"), "--no-ranking"]) == 0
    out = capsys.readouterr().out
    assert "[twn]" in out


def test_json_report_validates_against_schema(capsys):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads(SCHEMA_PATH.read_text())
    for name in FIXTURE_NAMES:
        code = main(["analyze", fixture(name), "--format", "json"])
        assert code in (0, 2)
        report = json.loads(capsys.readouterr().out)
        jsonschema.validate(report, schema)
        assert report["program"]["file"].endswith(f"{name}.its")


def test_simulate_reference_counts(capsys):
    code = main(
        ["simulate", fixture("nested"), "--state", "x1=7,x2=5,x3=1,x4=1,x5=3"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "runtime: 5" in out
    assert "t3: 2" in out


def test_simulate_divergence(capsys):
    code = main(["simulate", fixture("diverge"), "--state", "x=1", "--max-steps", "50"])
    assert code == 0
    assert "exceeded" in capsys.readouterr().out


def test_closed_form_output(capsys):
    assert main(["closed-form", fixture("geo_race"), "--transition", "t1"]) == 0
    out = capsys.readouterr().out
    assert "x1(n) = x1 * 4^n" in out
    assert "x2(n) = (-x3^3 + x2) * 9^n + x3^3" in out
    assert "x3(n) = x3" in out
    assert "valid from n = 0" in out


def test_closed_form_rejects_non_self_loop(capsys):
    assert main(["closed-form", fixture("nested"), "--transition", "t1"]) == 2
    assert "not analyzable" in capsys.readouterr().err


def test_unknown_transition_is_input_error(capsys):
    assert main(["closed-form", fixture("nested"), "--transition", "t9"]) == 3


def test_syntax_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.its"
    bad.write_text("(GOAL COMPLEXITY) (RULES l0(x) -> l1(x))")
    assert main(["analyze", str(bad)]) == 3
    assert "input error" in capsys.readouterr().err


def test_missing_file_exit_code(capsys):
    assert main(["analyze", "/nonexistent/prog.its"]) == 3


def test_explicit_missing_solver_exit_code(capsys):
    code = main(["analyze", fixture("countdown"), "--smt-solver", "/nonexistent/z3"])
    assert code == 4
    assert "solver" in capsys.readouterr().err


def test_bad_state_string(capsys):
    assert main(["simulate", fixture("countdown"), "--state", "q=1"]) == 3


def test_mprf_depth_note_on_stderr(capsys):
    code = main(["analyze", fixture("countdown"), "--mprf-depth", "4"])
    assert code == 0
    assert "depth" in capsys.readouterr().err

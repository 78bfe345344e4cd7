import stat
import sys
import textwrap
from fractions import Fraction

import pytest

from polybound.ir import Atom, Polynomial, mk_and, mk_or
from polybound.minismt import parse_sexprs, solve_lp
from polybound.smt import (
    LinearConstraint,
    SolverNotFound,
    check_sat_int,
    check_sat_real,
    int_script,
    parse_model,
    real_script,
    resolve_solver,
)

x = Polynomial.var("x")
y = Polynomial.var("y")

FALLBACK = [sys.executable, "-m", "polybound.minismt"]


# -- script emission (golden) ---------------------------------------------------


def test_int_script_golden():
    f = mk_and([Atom(x), Atom(-x + 3)])
    assert int_script(f) == textwrap.dedent(
        """\
        (set-logic QF_NIA)
        (declare-const x Int)
        (assert (and (> x 0) (> (+ (* (- 1) x) 3) 0)))
        (check-sat)
        (get-model)
        """
    )


def test_int_script_nonlinear_powers_expand_to_products():
    script = int_script(Atom(-(x**2) + 1))
    assert "(* (- 1) x x)" in script
    assert "^" not in script


def test_real_script_golden():
    constraints = [
        LinearConstraint.make({"a": Fraction(1), "b": Fraction(-1, 2)}, Fraction(1), ">="),
        LinearConstraint.make({"a": Fraction(1)}, 0, "="),
    ]
    assert real_script(constraints) == textwrap.dedent(
        """\
        (set-logic QF_NRA)
        (declare-const a Real)
        (declare-const b Real)
        (assert (>= (+ (* 1 a) (* (- (/ 1 2)) b) 1) 0))
        (assert (= (* 1 a) 0))
        (check-sat)
        (get-model)
        """
    )


# -- results through the bundled solver -----------------------------------------


def test_contradiction_unsat():
    f = mk_and([Atom(x), Atom(-x)])
    assert check_sat_int(f, solver=FALLBACK).is_unsat


def test_positive_sat_with_model():
    result = check_sat_int(Atom(x), solver=FALLBACK)
    assert result.is_sat
    assert result.model["x"] >= 1


def test_model_covers_all_variables():
    f = mk_or([Atom(x), Atom(y)])
    result = check_sat_int(f, solver=FALLBACK)
    assert result.is_sat
    assert set(result.model) >= {"x", "y"}


def test_real_system_sat_and_exact():
    constraints = [
        LinearConstraint.make({"a": Fraction(2)}, Fraction(-1), "="),  # 2a = 1
    ]
    result = check_sat_real(constraints, solver=FALLBACK)
    assert result.is_sat
    assert result.model["a"] == Fraction(1, 2)


def test_real_system_unsat():
    constraints = [
        LinearConstraint.make({"a": Fraction(1)}, Fraction(-1), ">="),  # a >= 1
        LinearConstraint.make({"a": Fraction(-1)}, Fraction(0), ">="),  # a <= 0
    ]
    assert check_sat_real(constraints, solver=FALLBACK).is_unsat


def test_empty_real_system_is_sat():
    result = check_sat_real([], solver=FALLBACK)
    assert result.is_sat
    assert result.model == {}


# -- model parsing ----------------------------------------------------------------


def test_parse_model_rationals_and_negatives():
    reply = parse_sexprs(
        "( (define-fun a () Real (/ 1 2)) (define-fun b () Int (- 3))"
        "  (define-fun c () Real (- (/ 7 4))) (define-fun d () Real 5.0) )"
    )
    model = parse_model(reply)
    assert model == {
        "a": Fraction(1, 2),
        "b": Fraction(-3),
        "c": Fraction(-7, 4),
        "d": Fraction(5),
    }


# -- process handling --------------------------------------------------------------


def test_timeout_yields_unknown(tmp_path):
    slow = tmp_path / "slow_solver.py"
    slow.write_text("import time\ntime.sleep(60)\n")
    result = check_sat_int(Atom(x), timeout_ms=50, solver=[sys.executable, str(slow)])
    assert result.status == "unknown"
    assert "timeout" in result.reason


def test_missing_solver_binary_is_unknown():
    result = check_sat_int(Atom(x), solver=["/nonexistent/solver-binary"])
    assert result.status == "unknown"
    assert "not found" in result.reason


def test_garbage_output_is_unknown(tmp_path):
    bad = tmp_path / "bad_solver.py"
    bad.write_text("print('flagrant nonsense')\n")
    result = check_sat_int(Atom(x), solver=[sys.executable, str(bad)])
    assert result.status == "unknown"
    assert result.transcript


def test_resolve_solver_explicit_missing_raises():
    with pytest.raises(SolverNotFound):
        resolve_solver("/nonexistent/z3-binary")


def test_resolve_solver_env_override(tmp_path, monkeypatch):
    fake = tmp_path / "fake-solver"
    fake.write_text("#!/bin/sh\necho unsat\n")
    fake.chmod(fake.stat().st_mode | stat.S_IEXEC)
    monkeypatch.setenv("POLYBOUND_SMT", str(fake))
    assert resolve_solver() == [str(fake)]
    monkeypatch.setenv("POLYBOUND_SMT", "/nonexistent/solver")
    with pytest.raises(SolverNotFound):
        resolve_solver()


def test_resolve_solver_falls_back_to_bundled(monkeypatch):
    monkeypatch.delenv("POLYBOUND_SMT", raising=False)
    monkeypatch.setenv("PATH", "/definitely/not/a/path")
    assert resolve_solver() == FALLBACK


# -- the bundled simplex -----------------------------------------------------------


def test_simplex_feasible_point_satisfies_rows():
    constraints = [
        ({"a": Fraction(1), "b": Fraction(1)}, Fraction(-2), ">="),  # a + b >= 2
        ({"a": Fraction(-1)}, Fraction(5), ">="),  # a <= 5
        ({"b": Fraction(-1)}, Fraction(0), ">="),  # b <= 0
        ({"a": Fraction(1), "b": Fraction(-1)}, Fraction(0), "="),  # a = b
    ]
    status, point = solve_lp(constraints)
    assert status == "unsat"  # a = b and b <= 0 contradict a + b >= 2

    status, point = solve_lp(constraints[:3])
    assert status == "sat"
    a, b = point["a"], point["b"]
    assert a + b >= 2 and a <= 5 and b <= 0


def test_simplex_strict_boundary_is_unsat():
    constraints = [
        ({"a": Fraction(1)}, Fraction(0), ">"),  # a > 0
        ({"a": Fraction(-1)}, Fraction(0), ">="),  # a <= 0
    ]
    status, _ = solve_lp(constraints)
    assert status == "unsat"


def test_simplex_negative_solutions_reachable():
    constraints = [
        ({"a": Fraction(1)}, Fraction(3), "="),  # a = -3
    ]
    status, point = solve_lp(constraints)
    assert status == "sat"
    assert point["a"] == -3

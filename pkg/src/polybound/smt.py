"""Bridge to an SMT solver over the SMT-LIB2 textual protocol.

One solver process per query: the script is written to the process's
standard input, the reply parsed from its standard output, and the process
killed at the timeout.  ``Unknown`` is always a safe outcome for callers
(bounds stay infinite, verdicts stay undecided), so a broken or missing
solver can never make the analyzer unsound.

Solver resolution order: explicit path argument, the ``POLYBOUND_SMT``
environment variable, a ``z3`` binary on the PATH, and finally the bundled
fallback procedure (:mod:`polybound.minismt`) run as a subprocess.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .ir import And, Atom, Formula, formula_vars


class SolverNotFound(Exception):
    pass


@dataclass
class SmtResult:
    status: str  # "sat" | "unsat" | "unknown"
    model: dict[str, Fraction] = field(default_factory=dict)
    reason: str = ""
    transcript: str = ""

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"

    @property
    def is_unsat(self) -> bool:
        return self.status == "unsat"


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coeffs[v] * v) + const REL 0`` with REL in {=, >=, >}."""

    coeffs: tuple[tuple[str, Fraction], ...]
    const: Fraction
    rel: str

    @staticmethod
    def make(coeffs: dict[str, Fraction], const, rel: str) -> "LinearConstraint":
        items = tuple(sorted((v, Fraction(c)) for v, c in coeffs.items() if c != 0))
        return LinearConstraint(items, Fraction(const), rel)


def resolve_solver(explicit: str | None = None) -> list[str]:
    """Command line for the solver process; raises only for explicit paths."""
    for source, path in (("option", explicit), ("env", os.environ.get("POLYBOUND_SMT"))):
        if not path:
            continue
        resolved = shutil.which(path) or (path if os.path.isfile(path) else None)
        if resolved is None:
            raise SolverNotFound(f"solver from {source} not found: {path}")
        return _command_for(resolved)
    found = shutil.which("z3")
    if found:
        return _command_for(found)
    return [sys.executable, "-m", "polybound.minismt"]


def _command_for(path: str) -> list[str]:
    name = os.path.basename(path)
    if "z3" in name:
        return [path, "-in", "-smt2"]
    return [path]


# -- script emission -----------------------------------------------------------


def poly_to_sexpr(p) -> str:
    """Powers are expanded to products; SMT-LIB has no integer power."""
    terms = []
    for mono, coeff in p.sorted_terms():
        factors = [_int_sexpr(coeff)] if (coeff != 1 or not mono) else []
        for v, e in mono:
            factors.extend([v] * e)
        terms.append(factors[0] if len(factors) == 1 else "(* " + " ".join(factors) + ")")
    if not terms:
        return "0"
    if len(terms) == 1:
        return terms[0]
    return "(+ " + " ".join(terms) + ")"


def _int_sexpr(c: Fraction) -> str:
    assert c.denominator == 1
    n = c.numerator
    return str(n) if n >= 0 else f"(- {-n})"


def _frac_sexpr(c: Fraction) -> str:
    if c.denominator == 1:
        n = c.numerator
        return str(n) if n >= 0 else f"(- {-n})"
    body = f"(/ {abs(c.numerator)} {c.denominator})"
    return body if c >= 0 else f"(- {body})"


def formula_to_sexpr(f: Formula) -> str:
    if isinstance(f, Atom):
        return f"(> {poly_to_sexpr(f.poly)} 0)"
    op = "and" if isinstance(f, And) else "or"
    return f"({op} " + " ".join(formula_to_sexpr(c) for c in f.children) + ")"


def int_script(f: Formula) -> str:
    lines = ["(set-logic QF_NIA)"]
    for v in sorted(formula_vars(f)):
        lines.append(f"(declare-const {v} Int)")
    lines.append(f"(assert {formula_to_sexpr(f)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def real_script(constraints: list[LinearConstraint]) -> str:
    lines = ["(set-logic QF_NRA)"]
    names = sorted({v for c in constraints for v, _ in c.coeffs})
    for v in names:
        lines.append(f"(declare-const {v} Real)")
    for c in constraints:
        parts = [f"(* {_frac_sexpr(k)} {v})" for v, k in c.coeffs]
        if c.const != 0 or not parts:
            parts.append(_frac_sexpr(c.const))
        body = parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")"
        lines.append(f"(assert ({c.rel} {body} 0))")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


# -- reply parsing --------------------------------------------------------------


def _parse_value(expr) -> Fraction | None:
    if isinstance(expr, str):
        try:
            return Fraction(expr)  # handles "3", "-3", "1.5", "5.0"
        except (ValueError, ZeroDivisionError):
            return None
    if not expr:
        return None
    if expr[0] == "-" and len(expr) == 2:
        inner = _parse_value(expr[1])
        return None if inner is None else -inner
    if expr[0] == "/" and len(expr) == 3:
        num = _parse_value(expr[1])
        den = _parse_value(expr[2])
        if num is None or den is None or den == 0:
            return None
        return num / den
    return None


def parse_model(sexprs) -> dict[str, Fraction]:
    model: dict[str, Fraction] = {}

    def walk(node):
        if isinstance(node, list):
            if len(node) >= 5 and node[0] == "define-fun" and node[2] == []:
                value = _parse_value(node[4])
                if value is not None:
                    model[node[1]] = value
            else:
                for child in node:
                    walk(child)

    for node in sexprs:
        walk(node)
    return model


def _run_solver(script: str, timeout_ms: int, solver: list[str] | None) -> SmtResult:
    cmd = solver if solver is not None else resolve_solver()
    try:
        proc = subprocess.run(
            cmd,
            input=script,
            capture_output=True,
            text=True,
            timeout=max(timeout_ms, 1) / 1000.0,
        )
    except subprocess.TimeoutExpired:
        return SmtResult("unknown", reason=f"timeout after {timeout_ms} ms")
    except FileNotFoundError as exc:
        return SmtResult("unknown", reason=f"solver not found: {exc}")
    except OSError as exc:
        return SmtResult("unknown", reason=f"solver failed: {exc}")
    transcript = proc.stdout + (("\n" + proc.stderr) if proc.stderr else "")
    status = None
    rest_lines: list[str] = []
    for line in proc.stdout.splitlines():
        stripped = line.strip()
        if status is None and stripped in ("sat", "unsat", "unknown"):
            status = stripped
        elif status is not None:
            rest_lines.append(line)
    if status is None:
        return SmtResult("unknown", reason="no verdict in solver output", transcript=transcript)
    if status == "sat":
        try:
            from .minismt import parse_sexprs

            model = parse_model(parse_sexprs("\n".join(rest_lines)))
        except Exception:
            return SmtResult("unknown", reason="unparseable model", transcript=transcript)
        return SmtResult("sat", model=model, transcript=transcript)
    if status == "unsat":
        return SmtResult("unsat", transcript=transcript)
    return SmtResult("unknown", reason="solver reported unknown", transcript=transcript)


def check_sat_int(f: Formula, timeout_ms: int = 5000, solver: list[str] | None = None) -> SmtResult:
    """Satisfiability of a guard formula over integer-valued variables."""
    result = _run_solver(int_script(f), timeout_ms, solver)
    if result.is_sat:
        for v in formula_vars(f):
            result.model.setdefault(v, Fraction(0))
    return result


def check_sat_real(
    constraints: list[LinearConstraint],
    timeout_ms: int = 5000,
    solver: list[str] | None = None,
) -> SmtResult:
    """Satisfiability of an affine constraint system over real unknowns."""
    result = _run_solver(real_script(constraints), timeout_ms, solver)
    if result.is_sat:
        for c in constraints:
            for v, _ in c.coeffs:
                result.model.setdefault(v, Fraction(0))
    return result


@dataclass
class SmtContext:
    """Solver configuration threaded through the analysis."""

    solver: list[str] | None = None
    timeout_ms: int = 5000

    def sat_int(self, f: Formula) -> SmtResult:
        return check_sat_int(f, self.timeout_ms, self.solver)

    def sat_real(self, constraints: list[LinearConstraint]) -> SmtResult:
        return check_sat_real(constraints, self.timeout_ms, self.solver)

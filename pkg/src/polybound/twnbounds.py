"""Termination and local runtime bounds for twn self-loops.

The pipeline per self-loop: detect (and possibly chain), compute closed
forms, reduce non-termination to an existential integer formula, ask the
solver, and for terminating loops derive a symbolic bound on the iteration
count from a stabilization argument.

Every guard atom, with the closed forms substituted, becomes a
poly-exponential expression whose sign as a function of n is eventually
decided by its asymptotically largest addend with a nonzero coefficient.
"Eventually" is quantified by dominance thresholds: past them, each addend
exceeds its lower neighbour by a spare factor n, so the top nonzero addend
outweighs the magnitude sum of everything below it once n also exceeds that
coefficient sum.  The resulting per-atom bound is polynomial in the loop's
entry state, and their total bounds how long any guard atom can still flip,
hence how long a terminating loop can run.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bounds import (
    Bound,
    Const,
    INFINITE,
    bound_of_poly,
    bound_subst,
    bprod,
    bsum,
    Exp,
    is_omega,
    simplify,
)
from .ir import (
    Atom,
    FALSE,
    Formula,
    Polynomial,
    Program,
    Transition,
    atoms as formula_atoms,
    eval_formula,
    map_atoms,
    mk_and,
    mk_or,
)
from .polyexp import PolyExp, pe_eval, pe_normalize_integer, pe_substitute
from .smt import SmtContext
from .twn import ClosedForm, TwnLoop, TwnRejection, closed_form, twn_check

SEARCH_CAP = 10**6


class CapExceeded(Exception):
    """Internal search cap hit; treated as Unknown for the affected loop."""


@dataclass(frozen=True)
class TerminationVerdict:
    status: str  # "terminating" | "nonterminating" | "unknown"
    witness: dict[str, int] | None = None
    reason: str = ""

    @property
    def is_terminating(self) -> bool:
        return self.status == "terminating"


@dataclass
class Unsupported:
    reason: str


@dataclass
class TwnAnalysis:
    """Everything the engine and the size-bound rules need for one self-loop."""

    transition: Transition
    loop: TwnLoop
    cf: ClosedForm
    verdict: TerminationVerdict
    iteration_bound: Bound | None  # bounds n for the analyzed (maybe chained) loop
    local_bound: Bound | None  # bounds steps of the original transition


def eventual_atom(pe: PolyExp) -> Formula:
    """Formula over the program variables: "eventually always ``pe > 0``".

    With addends ascending in asymptotic order, the sign of the expression
    settles on the sign of the top nonzero coefficient, so: some coefficient
    is positive and all above it vanish.  The empty expression is never
    positive.  Denominators are cleared first (a positive scaling preserves
    all signs) so the coefficient polynomials are integer-valued and the
    equality encoding of the atom carrier is exact.
    """
    _, pe = pe_normalize_integer(pe)
    addends = pe.addends
    if not addends:
        return FALSE
    cases = []
    for k in range(len(addends)):
        q_k = addends[k][0]
        parts: list[Formula] = [Atom(q_k)]
        for j in range(k + 1, len(addends)):
            q_j = addends[j][0]
            parts.append(mk_and([Atom(-q_j + 1), Atom(q_j + 1)]))  # q_j = 0
        cases.append(mk_and(parts))
    return mk_or(cases)


def nontermination_formula(loop: TwnLoop, cf: ClosedForm) -> Formula:
    """Existential formula equivalent to: some input runs forever.

    Each guard atom's truth value under the closed forms stabilizes, hence so
    does any positive boolean combination; replacing every atom by its
    eventual version therefore captures "the guard eventually always holds".
    """
    return map_atoms(
        loop.guard, lambda a: eventual_atom(pe_substitute(a.poly, cf.values))
    )


def dominance_threshold(lower: tuple[int, int], upper: tuple[int, int]) -> int:
    """Smallest verified D >= 1 with ``n * n^a1 * b1^n <= n^a2 * b2^n`` for
    all n >= D, where lower = (a1, b1) strictly precedes upper = (a2, b2) in
    asymptotic order (base major).

    Equal bases need a1 < a2, so the spare factor n fits degree-wise and
    D = 1.  For b1 < b2 the ratio with e = max(0, a1+1-a2) is eventually
    non-increasing (from the first n with ``(n+1)^e b1 <= n^e b2``); scan up
    to the first point where the inequality holds past that, then return one
    past the last failure.  Exact integer arithmetic throughout.
    """
    a1, b1 = lower
    a2, b2 = upper
    if (b1, a1) >= (b2, a2):
        raise ValueError("addends not in ascending asymptotic order")
    if b1 == b2:
        return 1  # a1 + 1 <= a2

    def holds(n: int) -> bool:
        return n ** (a1 + 1) * b1**n <= n**a2 * b2**n

    e = max(0, a1 + 1 - a2)
    n_dec = 1
    while (n_dec + 1) ** e * b1 > n_dec**e * b2:
        n_dec += 1
        if n_dec > SEARCH_CAP:
            raise CapExceeded("ratio never turns non-increasing")
    n_ok = n_dec
    while not holds(n_ok):
        n_ok += 1
        if n_ok > SEARCH_CAP:
            raise CapExceeded("dominance point not found")
    last_failure = 0
    for m in range(1, n_ok):
        if not holds(m):
            last_failure = m
    return last_failure + 1


def atom_stabilization_bound(pe: PolyExp) -> Bound:
    """Symbolic bound past which the sign of ``pe`` cannot change.

    After clearing denominators the top nonzero coefficient has magnitude
    at least 1 at integer states; past every pairwise dominance threshold
    each lower addend gives away a factor n, so once n also exceeds
    1 + sum of the lower coefficient magnitudes, the top addend dominates.
    """
    _, pe = pe_normalize_integer(pe)
    addends = pe.addends
    if len(addends) <= 1:
        return Const(1)
    d_max = 1
    for j in range(len(addends) - 1):
        _, a1, b1 = addends[j]
        _, a2, b2 = addends[j + 1]
        d_max = max(d_max, dominance_threshold((a1, b1), (a2, b2)))
    parts: list[Bound] = [Const(d_max + 1)]
    for q, _, _ in addends[:-1]:
        parts.append(bound_of_poly(q))
    return bsum(parts)


def stabilization_bound(loop: TwnLoop, cf: ClosedForm) -> Bound:
    """Bound (in the entry state) on iterations before every guard atom of
    the loop has reached its final truth value under the closed forms."""
    parts: list[Bound] = [Const(cf.start)]
    for atom in formula_atoms(loop.guard):
        pe = pe_substitute(atom.poly, cf.values)
        parts.append(atom_stabilization_bound(pe))
    return simplify(bsum(parts))


def prove_termination(
    loop: TwnLoop, cf: ClosedForm, smt: SmtContext | None = None
) -> TerminationVerdict:
    """Unsat of the non-termination formula proves termination; a model is
    turned into a concrete witness state and sanity-checked by simulation."""
    smt = smt or SmtContext()
    formula = nontermination_formula(loop, cf)
    result = smt.sat_int(formula)
    if result.is_unsat:
        return TerminationVerdict("terminating")
    if not result.is_sat:
        return TerminationVerdict("unknown", reason=result.reason or "solver unknown")

    model: dict[str, int] = {}
    for v in loop.update:
        value = result.model.get(v, Fraction(0))
        if value.denominator != 1:
            return TerminationVerdict("unknown", reason="non-integer model value")
        model[v] = value.numerator
    try:
        m_hat = _numeric_stabilization_point(loop, cf, model)
    except CapExceeded:
        return TerminationVerdict("unknown", reason="stabilization search cap")
    witness_n = max(cf.start, m_hat)
    witness = {
        v: _int_value(pe_eval(cf[v], model, witness_n)) for v in loop.update
    }
    if any(value is None for value in witness.values()):
        return TerminationVerdict("unknown", reason="non-integer witness")
    state = {v: int(value) for v, value in witness.items()}  # type: ignore[arg-type]
    current = dict(state)
    for _ in range(100):
        if not eval_formula(loop.guard, current):
            return TerminationVerdict("unknown", reason="witness failed simulation")
        current = {v: rhs.evaluate_int(current) for v, rhs in loop.update.items()}
    return TerminationVerdict("nonterminating", witness=state)


def _int_value(value: Fraction) -> int | None:
    return value.numerator if value.denominator == 1 else None


def _numeric_stabilization_point(
    loop: TwnLoop, cf: ClosedForm, state: dict[str, int]
) -> int:
    """First n where every guard atom's sign matches its eventual sign and
    the top nonzero addend dominates the magnitude sum of the lower ones."""
    pes = [pe_substitute(a.poly, cf.values) for a in formula_atoms(loop.guard)]
    n = max(cf.start, 1)
    while n <= SEARCH_CAP:
        if all(_stable_at(pe, state, n) for pe in pes):
            return n
        n += 1
    raise CapExceeded("no numeric stabilization point found")


def _stable_at(pe: PolyExp, state: dict[str, int], n: int) -> bool:
    values = [(q.evaluate(state), a, b) for q, a, b in pe.addends]
    top = next(
        (i for i in range(len(values) - 1, -1, -1) if values[i][0] != 0), None
    )
    current = sum(v * Fraction(n) ** a * Fraction(b) ** n for v, a, b in values)
    if top is None:
        return current == 0
    v_top, a_top, b_top = values[top]
    eventual_positive = v_top > 0
    if (current > 0) != eventual_positive:
        return False
    dominated = sum(
        abs(v) * Fraction(n) ** a * Fraction(b) ** n for v, a, b in values[:top]
    )
    return abs(v_top) * Fraction(n) ** a_top * Fraction(b_top) ** n > dominated


def analyze_self_loop(
    t: Transition, smt: SmtContext | None = None
) -> TwnAnalysis | Unsupported:
    """Full pipeline: check, closed form, termination, stabilization bound.

    For chained loops the stabilization bound B counts double-steps, so the
    original transition gets 2*B + 1; the closed-form validity start is added
    on top to cover the uncovered prefix.
    """
    try:
        loop = twn_check(t)
    except TwnRejection as exc:
        return Unsupported(str(exc))
    cf = closed_form(loop)
    verdict = prove_termination(loop, cf, smt)
    if not verdict.is_terminating:
        return TwnAnalysis(t, loop, cf, verdict, None, None)
    try:
        iteration_bound = stabilization_bound(loop, cf)
    except CapExceeded as exc:
        return Unsupported(f"threshold search cap exceeded: {exc}")
    local: Bound = iteration_bound
    if loop.chained:
        local = bsum([bprod([Const(2), local]), Const(1)])
    local = simplify(bsum([local, Const(cf.start)]))
    return TwnAnalysis(t, loop, cf, verdict, iteration_bound, local)


def twn_local_runtime_bound(
    t: Transition, p: Program, smt: SmtContext | None = None
) -> TwnAnalysis | Unsupported:
    """Local runtime bound for a self-loop, or the reason there is none."""
    analysis = analyze_self_loop(t, smt)
    if isinstance(analysis, Unsupported):
        return analysis
    if analysis.local_bound is None:
        return Unsupported(
            f"termination not established: {analysis.verdict.status}"
            + (f" ({analysis.verdict.reason})" if analysis.verdict.reason else "")
        )
    return analysis


def twn_size_bound(analysis: TwnAnalysis, v: str, R: Bound | None = None) -> Bound:
    """Bound on ``|v|`` after any number of steps of the analyzed transition,
    in terms of the state at loop entry.

    Each closed-form addend ``q * n^a * b^n`` is bounded by its coefficient
    magnitude times the extremal value at n = R + start; the iterations not
    covered by the closed form (below its start, and odd steps of a chained
    loop) are covered by explicitly iterated update polynomials.
    """
    if R is None:
        R = analysis.iteration_bound
    if R is None or is_omega(R):
        return INFINITE
    reach = simplify(bsum([R, Const(analysis.cf.start)]))
    even_bound = _even_size(analysis, v, reach)
    if not analysis.loop.chained:
        return even_bound
    # odd steps of the original loop: one original update applied to a state
    # the chained analysis already bounds
    assert analysis.loop.original_update is not None
    even_bounds = {w: _even_size(analysis, w, reach) for w in analysis.loop.update}
    odd = bound_subst(bound_of_poly(analysis.loop.original_update[v]), even_bounds)
    return simplify(bsum([even_bound, odd]))


def _even_size(analysis: TwnAnalysis, v: str, reach: Bound) -> Bound:
    parts: list[Bound] = []
    for q, a, b in analysis.cf[v].addends:
        factors: list[Bound] = [bound_of_poly(q)]
        factors.extend([reach] * a)
        if b != 1:
            factors.append(Exp(b, reach))
        parts.append(bprod(factors))
    iterate = {w: Polynomial.var(w) for w in analysis.loop.update}
    for _ in range(analysis.cf.start):
        parts.append(bound_of_poly(iterate[v]))
        iterate = {
            w: rhs.substitute(iterate) for w, rhs in analysis.loop.update.items()
        }
    return simplify(bsum(parts))

"""Size bounds: how large can ``|v|`` be right after a transition fires.

Bounds are in terms of the initial absolute-value state.  The rules form a
small, auditable fragment, applied first-match per (transition, variable):

  R0  transitions out of the start location: coefficient bound of the update
      (the variables denote initial values).
  R1  transitions outside every cycle: update bound composed with the size
      bounds of the predecessors of the source location.
  R2  component-invariant variables (every transition in the component keeps
      them): the entry bounds pass through.
  R2b cyclic transitions whose update for ``v`` reads only component-invariant
      variables: as R1, with the predecessor bounds of those variables known
      via R2.
  R3  additive counters (every component transition keeps, shifts by a
      constant, or resets ``v``): entry bounds plus reset magnitudes plus
      increment magnitudes scaled by how often each incrementing transition
      can run.
  R5  single twn self-loops with a finite local bound: the closed-form size
      bound, composed with the entry bounds.
  R6  everything else is unbounded.

Maxima over incoming or entry transitions are over-approximated by sums,
which is sound because all bounds are nonnegative.
"""

from __future__ import annotations

from .bounds import (
    Bound,
    INFINITE,
    bound_of_poly,
    bound_subst,
    bsum,
    is_omega,
    simplify,
)
from .ir import Polynomial, Program, Transition, entry_transitions
from .twnbounds import TwnAnalysis, twn_size_bound

SizeBoundMap = dict[tuple[str, str], Bound]


def local_size_bound(t: Transition, v: str) -> Bound:
    """Coefficient-magnitude bound of the update polynomial for ``v``."""
    return bound_of_poly(t.update[v])


def _incoming_sum(p: Program, loc: str, v: str, sb: SizeBoundMap) -> Bound:
    parts = [sb[(r.tid, v)] for r in p.incoming(loc)]
    return simplify(bsum(parts))


def _acyclic_bound(p: Program, t: Transition, v: str, sb: SizeBoundMap) -> Bound:
    if t.src == p.init:
        return simplify(local_size_bound(t, v))
    mapping = {
        w: _incoming_sum(p, t.src, w, sb) for w in t.update[v].variables()
    }
    return simplify(bound_subst(local_size_bound(t, v), mapping))


def size_bounds_for_scc(
    p: Program,
    scc: list[Transition],
    rb: dict[str, Bound],
    sb: SizeBoundMap,
    twn_analyses: dict[str, TwnAnalysis] | None = None,
) -> SizeBoundMap:
    """Assign SB(t, v) for every transition of the unit; returns ``sb``.

    A single non-cyclic transition is handled as its own unit via R0/R1.
    Preconditions: size bounds of transitions topologically before the unit
    are present; runtime bounds may still be infinite (the affected entries
    simply stay infinite until recomputation).
    """
    twn_analyses = twn_analyses or {}
    if len(scc) == 1 and not scc[0].is_self_loop:
        t = scc[0]
        for v in p.vars:
            sb[(t.tid, v)] = _acyclic_bound(p, t, v, sb)
        return sb

    entries = entry_transitions(p, scc)
    invariant = {
        v
        for v in p.vars
        if all(t.update[v] == Polynomial.var(v) for t in scc)
    }

    def entry_sum(v: str) -> Bound:
        return simplify(bsum(sb[(r.tid, v)] for r in entries))

    # R2 first: these values feed R2b within the same pass.
    for v in invariant:
        value = entry_sum(v)
        for t in scc:
            sb[(t.tid, v)] = value

    for t in scc:
        for v in p.vars:
            if v in invariant:
                continue
            sb[(t.tid, v)] = _scc_bound(p, t, v, scc, entries, invariant, rb, sb,
                                        twn_analyses, entry_sum)
    return sb


def _scc_bound(
    p: Program,
    t: Transition,
    v: str,
    scc: list[Transition],
    entries: list[Transition],
    invariant: set[str],
    rb: dict[str, Bound],
    sb: SizeBoundMap,
    twn_analyses: dict[str, TwnAnalysis],
    entry_sum,
) -> Bound:
    # R2b: the update reads only component-invariant variables
    if t.update[v].variables() <= invariant:
        mapping = {
            w: _incoming_sum(p, t.src, w, sb) for w in t.update[v].variables()
        }
        return simplify(bound_subst(local_size_bound(t, v), mapping))

    # R3: additive counter across the whole component
    increments: list[tuple[str, int]] = []
    resets: list[int] = []
    additive = True
    for t2 in scc:
        rhs = t2.update[v]
        if rhs == Polynomial.var(v):
            continue
        if rhs.is_const and rhs.is_integral():
            resets.append(abs(int(rhs.const_value())))
            continue
        diff = rhs - Polynomial.var(v)
        if diff.is_const and diff.is_integral():
            increments.append((t2.tid, abs(int(diff.const_value()))))
            continue
        additive = False
        break
    if additive:
        parts: list[Bound] = [entry_sum(v)]
        from .bounds import Const, bprod

        for c in resets:
            parts.append(Const(c))
        for tid, c in increments:
            parts.append(bprod([Const(c), rb[tid]]))
        return simplify(bsum(parts))

    # R5: twn self-loop component with a finite local bound
    if len(scc) == 1 and scc[0].is_self_loop:
        analysis = twn_analyses.get(t.tid)
        if analysis is not None and analysis.iteration_bound is not None:
            raw = twn_size_bound(analysis, v)
            if not is_omega(raw):
                from .bounds import bound_vars

                mapping = {w: entry_sum(w) for w in bound_vars(raw)}
                return simplify(bound_subst(raw, mapping))

    # R6
    return INFINITE

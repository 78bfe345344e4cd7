"""Guard formulas: positive boolean combinations of strict polynomial atoms.

``Atom(p)`` means ``p > 0`` over the integers.  Formulas are negation free;
relations other than ``>`` and all negations are compiled away by
:func:`normalize_atom` and the parser.  The trivially true formula is the
atom ``1 > 0``; the zero polynomial gives the trivially false atom.

Atoms clear rational denominators on construction (scaling by a positive
constant preserves the sign), so every stored atom has integer coefficients
and ``p > 0`` is equivalent to ``p >= 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Union

from .poly import Polynomial


class DnfCapExceeded(Exception):
    """Raised when DNF expansion would exceed the configured clause cap."""

    def __init__(self, needed: int, cap: int):
        self.needed = needed
        self.cap = cap
        super().__init__(f"DNF expansion needs more than {cap} clauses")


@dataclass(frozen=True)
class Atom:
    poly: Polynomial

    def __post_init__(self):
        scale = self.poly.denominator_lcm()
        if scale != 1:
            object.__setattr__(self, "poly", self.poly.scale(scale))

    @property
    def is_const(self) -> bool:
        return self.poly.is_const

    def const_truth(self) -> bool:
        return self.poly.const_value() > 0

    def holds(self, state: Mapping[str, int]) -> bool:
        return self.poly.evaluate(state) > 0

    def __str__(self) -> str:
        return f"{self.poly} > 0"


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]

    def __str__(self) -> str:
        return " && ".join(
            f"({c})" if isinstance(c, Or) else str(c) for c in self.children
        )


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]

    def __str__(self) -> str:
        return " || ".join(str(c) for c in self.children)


Formula = Union[Atom, And, Or]

TRUE = Atom(Polynomial.one())
FALSE = Atom(Polynomial.zero())


def mk_and(children) -> Formula:
    flat: list[Formula] = []
    for c in children:
        if isinstance(c, And):
            flat.extend(c.children)
        elif c == TRUE:
            continue
        elif c == FALSE:
            return FALSE
        else:
            flat.append(c)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def mk_or(children) -> Formula:
    flat: list[Formula] = []
    for c in children:
        if isinstance(c, Or):
            flat.extend(c.children)
        elif c == FALSE:
            continue
        elif c == TRUE:
            return TRUE
        else:
            flat.append(c)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def normalize_atom(lhs: Polynomial, rel: str, rhs: Polynomial) -> Formula:
    """Translate ``lhs REL rhs`` into a negation-free formula over atoms.

    Integer-exact translations: ``a <= b`` becomes ``b - a + 1 > 0``, equality
    expands to two inequalities and disequality to a disjunction.
    """
    if rel == "<":
        return Atom(rhs - lhs)
    if rel == ">":
        return Atom(lhs - rhs)
    if rel == "<=":
        return Atom(rhs - lhs + 1)
    if rel == ">=":
        return Atom(lhs - rhs + 1)
    if rel == "=":
        return mk_and([Atom(rhs - lhs + 1), Atom(lhs - rhs + 1)])
    if rel == "!=":
        return mk_or([Atom(lhs - rhs), Atom(rhs - lhs)])
    raise ValueError(f"unknown relation {rel!r}")


NEGATED_REL = {"<": ">=", ">": "<=", "<=": ">", ">=": "<", "=": "!=", "!=": "="}


def eval_formula(f: Formula, state: Mapping[str, int]) -> bool:
    if isinstance(f, Atom):
        return f.holds(state)
    if isinstance(f, And):
        return all(eval_formula(c, state) for c in f.children)
    return any(eval_formula(c, state) for c in f.children)


def atoms(f: Formula) -> Iterator[Atom]:
    if isinstance(f, Atom):
        yield f
    else:
        for c in f.children:
            yield from atoms(c)


def map_atoms(f: Formula, fn: Callable[[Atom], Formula]) -> Formula:
    if isinstance(f, Atom):
        return fn(f)
    mapped = [map_atoms(c, fn) for c in f.children]
    return mk_and(mapped) if isinstance(f, And) else mk_or(mapped)


def substitute(f: Formula, mapping: Mapping[str, Polynomial]) -> Formula:
    return map_atoms(f, lambda a: Atom(a.poly.substitute(mapping)))


def formula_vars(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    for a in atoms(f):
        out |= a.poly.variables()
    return frozenset(out)


def dnf(f: Formula, cap: int = 64) -> list[tuple[Atom, ...]]:
    """Expand to a list of clauses (conjunctions of atoms).

    The disjunction of the returned clauses is equivalent to ``f``.  Constant
    atoms are resolved: true atoms are dropped from clauses, clauses holding a
    false atom are dropped entirely.  The empty clause is the true clause.
    """
    clauses = _dnf(f, cap)
    return [tuple(c) for c in clauses]


def _dnf(f: Formula, cap: int) -> list[list[Atom]]:
    if isinstance(f, Atom):
        if f.is_const:
            return [[]] if f.const_truth() else []
        return [[f]]
    if isinstance(f, Or):
        out: list[list[Atom]] = []
        for c in f.children:
            out.extend(_dnf(c, cap))
            if len(out) > cap:
                raise DnfCapExceeded(len(out), cap)
        return out
    # And: distribute
    result: list[list[Atom]] = [[]]
    for c in f.children:
        sub = _dnf(c, cap)
        merged: list[list[Atom]] = []
        for left in result:
            for right in sub:
                clause = list(left)
                for a in right:
                    if a not in clause:
                        clause.append(a)
                merged.append(clause)
                if len(merged) > cap:
                    raise DnfCapExceeded(len(merged), cap)
        result = merged
    return result

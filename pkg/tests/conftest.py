import random
from pathlib import Path

import pytest
from hypothesis import settings

from polybound.ir import Polynomial, Program, Transition, TRUE, parse_program
from polybound.sim import make_config, step

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

FIXTURE_NAMES = [
    "nested",
    "geo_race",
    "countdown",
    "two_phase",
    "nonlinear_loop",
    "diverge",
    "two_loops",
    "straight_line",
    "additive",
    "flip_sign",
]


def load_fixture(name: str) -> Program:
    return parse_program((FIXTURES / f"{name}.its").read_text())


@pytest.fixture
def nested() -> Program:
    return load_fixture("nested")


@pytest.fixture
def geo_race() -> Program:
    return load_fixture("geo_race")


@pytest.fixture
def countdown() -> Program:
    return load_fixture("countdown")


def random_polynomial(rng: random.Random, variables, max_degree=3, max_coeff=9,
                      max_monomials=2) -> Polynomial:
    p = Polynomial.const(rng.randint(-max_coeff, max_coeff))
    for _ in range(rng.randint(0, max_monomials)):
        if not variables:
            break
        degree = rng.randint(1, max_degree)
        mono = Polynomial.one()
        for _ in range(degree):
            mono = mono * Polynomial.var(rng.choice(list(variables)))
        p = p + mono.scale(rng.randint(-max_coeff, max_coeff))
    return p


def random_twn_transition(rng: random.Random, max_vars=4, max_degree=3,
                          max_coeff=9, allow_negative=True,
                          guard=TRUE) -> Transition:
    """A random self-loop with triangular weakly non-linear update."""
    count = rng.randint(1, max_vars)
    variables = [f"x{i+1}" for i in range(count)]
    update = {}
    for i, v in enumerate(variables):
        low = -max_coeff if allow_negative else 0
        c = rng.randint(low, max_coeff)
        rest = random_polynomial(rng, variables[i + 1:], max_degree, max_coeff)
        update[v] = Polynomial.var(v).scale(c) + rest
    return Transition("loop", "l1", guard, update, "l1")


def wrap_loop(t: Transition) -> Program:
    """Embed a self-loop behind an initial transition."""
    variables = tuple(sorted(t.update.keys(), key=lambda v: (len(v), v)))
    init_update = {v: Polynomial.var(v) for v in variables}
    t0 = Transition("t0", "l0", TRUE, init_update, t.src)
    loop = Transition("t1", t.src, t.guard, dict(t.update), t.tgt)
    return Program(variables, frozenset({"l0", t.src}), "l0", (t0, loop))


def explore_sizes(p: Program, initial_state, max_steps=400, cap=20000):
    """Max ``|v|`` observed right after each transition, plus visit counts.

    Breadth-first over distinct configurations; sound for comparing against
    size bounds because every recorded value comes from a real reachable
    evaluation step.
    """
    root = make_config(p, p.init, initial_state)
    seen = {root}
    frontier = [root]
    maxima: dict[tuple[str, str], int] = {}
    depth = 0
    while frontier and depth < max_steps and len(seen) < cap:
        depth += 1
        next_frontier = []
        for config in frontier:
            for t, succ in step(p, config):
                for v, value in zip(p.vars, succ.values):
                    key = (t.tid, v)
                    maxima[key] = max(maxima.get(key, 0), abs(value))
                if succ not in seen:
                    seen.add(succ)
                    next_frontier.append(succ)
        frontier = next_frontier
    return maxima

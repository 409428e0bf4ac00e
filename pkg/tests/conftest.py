import itertools

import numpy as np
import pytest

from cascade_scheduling.cascade import run_deterministic
from cascade_scheduling.model import Schedule, Society


@pytest.fixture
def example1():
    return Society.from_params([0.2, 0.5, 0.8], [1, 2, 3])


@pytest.fixture
def example2():
    return Society.from_params([0.4, 0.3, 0.0], [1, 2, 2])


def example3(p, with_extra_edge=False):
    edges = ((0, 3), (1, 3), (2, 3)) + (((0, 1),) if with_extra_edge else ())
    return Society.from_params([p] * 4, [1] * 4, edges)


def random_complete(rng, max_n, p=None):
    n = int(rng.integers(1, max_n + 1))
    ps = [p] * n if p is not None else rng.random(n).tolist()
    society = Society.from_params(ps, rng.integers(1, n + 1, size=n).tolist())
    return society, Schedule(tuple(int(v) for v in rng.permutation(n)))


def enumerate_expected(society, schedule):
    """Literal oracle: product weights times adopters over every preference vector."""
    total = 0.0
    for prefs in itertools.product((False, True), repeat=society.n):
        weight = 1.0
        for a, pref in zip(society.areas, prefs):
            weight *= a.p if pref else a.q
        if weight:
            total += weight * run_deterministic(society, schedule, prefs).adopters
    return total


_acceptance_lines = []


def record_criterion(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    _acceptance_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines):
            terminalreporter.write_line(line)


def random_dag(rng, m, p):
    """DAG on a shuffled topological order: the first vertex is s, the last is t,
    and every other vertex draws at least one earlier predecessor."""
    from cascade_scheduling.gadget import ReliabilityInstance

    order = [int(v) for v in rng.permutation(m)]
    edges = set()
    for i in range(1, m):
        k = int(rng.integers(1, min(i, 3) + 1))
        for j in rng.choice(i, size=k, replace=False):
            edges.add((order[int(j)], order[i]))
    return ReliabilityInstance(m, tuple(sorted(edges)), order[0], order[-1], p)

"""Forward simulation of the influence-spread process.

A preference vector holds one boolean per area (``True`` means the area's
initial preference is to accept). Preferences are realized for every area up
front, even for areas whose threshold later overrides them, so a run is a
deterministic function of ``(society, schedule, prefs)``.

Randomness
----------
``run_random(seed)`` draws ``u = numpy.random.default_rng(seed).random(n)`` and
sets ``prefs[v] = u[v] < p_v``. ``monte_carlo`` runs trial ``i`` with seed
``trial_seed(master, i)``, a 64-bit word taken from
``numpy.random.SeedSequence(master, spawn_key=(i,))``, so each trial is
reproducible on its own and the estimate does not depend on evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Schedule, Society, ValidationError

ACCEPT = True
REJECT = False


@dataclass(frozen=True)
class CascadeRun:
    decisions: tuple[int, ...]  # indexed by area id, each +1 or -1
    trajectory: tuple[int, ...]  # trajectory[t - 1] is I_t
    adopters: int


def decide(pressure: int, threshold: int, prefers_accept: bool) -> int:
    """Decision of one area given the summed decisions of its decided neighbors."""
    if pressure >= threshold:
        return 1
    if pressure <= -threshold:
        return -1
    return 1 if prefers_accept else -1


def run_deterministic(society: Society, schedule: Schedule, prefs: Sequence[bool]) -> CascadeRun:
    schedule.check_against(society)
    if len(prefs) != society.n:
        raise ValidationError(
            f"preference vector has {len(prefs)} entries but society has {society.n} areas", "prefs"
        )
    decisions = [0] * society.n
    trajectory = []
    total = 0
    neighbors = None if society.is_complete else society.neighbors
    for v in schedule.order:
        # undecided neighbors still hold 0, so they drop out of the sum
        pressure = total if neighbors is None else sum(decisions[u] for u in neighbors[v])
        decisions[v] = decide(pressure, society.areas[v].c, bool(prefs[v]))
        total += decisions[v]
        trajectory.append(total)
    return CascadeRun(tuple(decisions), tuple(trajectory), (total + society.n) // 2)


def draw_preferences(society: Society, seed: int) -> tuple[bool, ...]:
    u = np.random.default_rng(seed).random(society.n)
    return tuple(bool(x) for x in u < np.asarray(society.p))


def run_random(society: Society, schedule: Schedule, seed: int) -> CascadeRun:
    return run_deterministic(society, schedule, draw_preferences(society, seed))


def trial_seed(master_seed: int, trial: int) -> int:
    state = np.random.SeedSequence(master_seed, spawn_key=(trial,)).generate_state(1, np.uint64)
    return int(state[0])


def simulate_batch(society: Society, schedule: Schedule, prefs: np.ndarray) -> np.ndarray:
    """Vectorized ``run_deterministic`` over the rows of a boolean ``(B, n)`` array.

    Returns the ``(B, n)`` int8 matrix of decisions indexed by area id.
    """
    prefs = np.asarray(prefs, dtype=bool)
    batch, n = prefs.shape
    if n != society.n:
        raise ValidationError(f"preference rows have {n} entries, society has {society.n}", "prefs")
    decisions = np.zeros((batch, n), dtype=np.int8)
    total = np.zeros(batch, dtype=np.int64)
    if not society.is_complete:
        nbrs = [np.fromiter(sorted(s), dtype=np.intp, count=len(s)) for s in society.neighbors]
    for v in schedule.order:
        if society.is_complete:
            pressure = total
        else:
            pressure = decisions[:, nbrs[v]].sum(axis=1, dtype=np.int64)
        c = society.areas[v].c
        d = np.where(prefs[:, v], 1, -1)
        d = np.where(pressure >= c, 1, np.where(pressure <= -c, -1, d))
        decisions[:, v] = d
        total += d
    return decisions


def monte_carlo(
    society: Society,
    schedule: Schedule,
    trials: int,
    seed: int = 0,
    batch_size: int = 8192,
) -> tuple[float, float]:
    """Estimate expected adopters. Returns ``(mean, standard error)``."""
    if trials < 1:
        raise ValidationError("trials must be >= 1", "trials")
    schedule.check_against(society)
    p = np.asarray(society.p)
    counts = np.empty(trials, dtype=np.int64)
    for start in range(0, trials, batch_size):
        stop = min(trials, start + batch_size)
        u = np.stack([np.random.default_rng(trial_seed(seed, i)).random(society.n) for i in range(start, stop)])
        decisions = simulate_batch(society, schedule, u < p)
        counts[start:stop] = (decisions == 1).sum(axis=1)
    mean = float(counts.mean())
    if trials == 1:
        return mean, 0.0
    stderr = float(counts.std(ddof=1)) / math.sqrt(trials)
    return mean, stderr

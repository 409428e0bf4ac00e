"""Scheduling strategies for full propagation.

Areas sharing ``(p, c)`` are interchangeable, so most searches here work on
*type sequences*: ``seq[t]`` is the (0-based) index of the type scheduled at
position ``t``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .cascade import decide
from .exact import (
    acceptance_probability,
    expected_adopters_batch,
    step_distribution,
)
from .model import (
    CapExceededError,
    InfeasibleError,
    Schedule,
    Society,
    TypeProfile,
    ValidationError,
    check_profiles,
)

MAX_ADAPTIVE_TYPES = 4
ADAPTIVE_BRUTEFORCE_CAP = 9
ENUMERATION_CAP = 10**6


# --- adaptive ---------------------------------------------------------------


class AdaptivePolicy:
    """Value and choice tables of the optimal adaptive strategy.

    States are ``(remaining counts, k)`` where ``k`` is the deployment number
    so far. Only reachable states are stored: with ``s`` areas already
    scheduled, ``k`` ranges over ``-s, -s + 2, ..., s``.
    """

    def __init__(self, profiles, values, choices, rows_by_layer, position, strides):
        self.profiles = profiles
        self.counts = tuple(t.count for t in profiles)
        self.n = sum(self.counts)
        self._values = values
        self._choices = choices
        self._rows = rows_by_layer
        self._position = position
        self._strides = strides

    def _locate(self, remaining: Sequence[int], k: int) -> tuple[int, int, int]:
        remaining = tuple(remaining)
        if len(remaining) != len(self.counts) or any(
            not 0 <= r <= c for r, c in zip(remaining, self.counts)
        ):
            raise KeyError(f"remaining counts {remaining} outside population {self.counts}")
        r = sum(remaining)
        s = self.n - r
        if abs(k) > s or (k + s) % 2:
            raise KeyError(f"deployment number {k} unreachable after {s} decisions")
        g = sum(x * st for x, st in zip(remaining, self._strides))
        return r, int(self._position[g]), (k + s) // 2

    def value(self, remaining: Sequence[int], k: int = 0) -> float:
        r, row, j = self._locate(remaining, k)
        return float(self._values[r][row, j])

    def choice(self, remaining: Sequence[int], k: int = 0) -> int | None:
        """Type to schedule next, or ``None`` once nothing remains."""
        r, row, j = self._locate(remaining, k)
        if r == 0:
            return None
        return int(self._choices[r][row, j])

    def rows(self) -> Iterator[tuple[tuple[int, ...], int, int, float]]:
        """``(remaining, k, choice, value)`` for every nonterminal reachable state."""
        for r in range(1, self.n + 1):
            s = self.n - r
            for row, g in enumerate(self._rows[r]):
                remaining = tuple(int(g // st % (c + 1)) for st, c in zip(self._strides, self.counts))
                for j in range(s + 1):
                    yield remaining, 2 * j - s, int(self._choices[r][row, j]), float(self._values[r][row, j])

    def play(self, outcomes: Sequence[bool]) -> list[int]:
        """Type sequence followed when the scheduled areas decide per ``outcomes``."""
        remaining = list(self.counts)
        k = 0
        seq = []
        for accepted in outcomes:
            i = self.choice(remaining, k)
            if i is None:
                break
            seq.append(i)
            remaining[i] -= 1
            k += 1 if accepted else -1
        return seq


def optimal_adaptive(
    profiles: Sequence[TypeProfile],
    max_types: int = MAX_ADAPTIVE_TYPES,
    keep_policy: bool = True,
) -> tuple[float, AdaptivePolicy | None]:
    """Best expected adopters over adaptive strategies, and the policy achieving it.

    Layered dynamic program over the number of areas still to schedule; each
    layer is a ``(count vectors, k)`` array. Cost is ``O(n^(t+1))`` for ``t``
    types. Ties go to the lowest type index.
    """
    profiles = check_profiles(profiles)
    t = len(profiles)
    if t > max_types:
        raise CapExceededError(f"{t} types exceeds the adaptive DP cap of {max_types}")
    counts = np.array([prof.count for prof in profiles])
    n = int(counts.sum())
    ps = np.array([prof.p for prof in profiles])
    cs = np.array([prof.c for prof in profiles])

    strides = np.ones(t, dtype=np.int64)
    for i in range(t - 2, -1, -1):
        strides[i] = strides[i + 1] * (counts[i + 1] + 1)
    grid = np.indices(tuple(counts + 1)).reshape(t, -1)  # column g is the count vector with index g
    layer_of = grid.sum(axis=0)
    position = np.empty(grid.shape[1], dtype=np.int64)
    rows_by_layer = []
    for r in range(n + 1):
        rows = np.flatnonzero(layer_of == r)
        position[rows] = np.arange(len(rows))
        rows_by_layer.append(rows)

    values = [np.zeros((1, n + 1))]
    choices = [np.zeros((1, n + 1), dtype=np.int8)]
    for r in range(1, n + 1):
        s = n - r
        rows = rows_by_layer[r]
        ks = np.arange(-s, s + 1, 2)
        prev = values[r - 1] if keep_policy else values[-1]
        options = np.full((t, len(rows), s + 1), -np.inf)
        for i in range(t):
            avail = grid[i, rows] > 0
            nxt = prev[position[rows[avail] - strides[i]]]
            a = acceptance_probability(ks, ps[i], cs[i])
            options[i, avail] = a * (1.0 + nxt[:, 1:]) + (1.0 - a) * nxt[:, :-1]
        best = options.argmax(axis=0)
        layer = np.take_along_axis(options, best[None], axis=0)[0]
        if keep_policy:
            values.append(layer)
            choices.append(best.astype(np.int8))
        else:
            values = [layer]
    top = float(values[-1][0, 0])
    if not keep_policy:
        return top, None
    return top, AdaptivePolicy(profiles, values, choices, rows_by_layer, position, tuple(int(x) for x in strides))


def adaptive_bruteforce(profiles: Sequence[TypeProfile], cap: int = ADAPTIVE_BRUTEFORCE_CAP) -> float:
    """Plain expectimax over full decision trees, no memoization."""
    profiles = check_profiles(profiles)
    counts = [prof.count for prof in profiles]
    if sum(counts) > cap:
        raise CapExceededError(f"adaptive brute force limited to n <= {cap}")

    def accept_prob(prof: TypeProfile, k: int) -> float:
        prob = 0.0
        if decide(k, prof.c, True) == 1:
            prob += prof.p
        if decide(k, prof.c, False) == 1:
            prob += 1.0 - prof.p
        return prob

    def expectimax(remaining: list[int], k: int) -> float:
        best = 0.0 if not any(remaining) else -math.inf
        for i, prof in enumerate(profiles):
            if remaining[i] == 0:
                continue
            remaining[i] -= 1
            a = accept_prob(prof, k)
            value = 0.0
            if a > 0:
                value += a * (1.0 + expectimax(remaining, k + 1))
            if a < 1:
                value += (1.0 - a) * expectimax(remaining, k - 1)
            remaining[i] += 1
            best = max(best, value)
        return best

    return expectimax(counts, 0)


# --- non-adaptive -----------------------------------------------------------


def sorted_strategy(society: Society) -> Schedule:
    """Areas by acceptance probability, highest first; ties by ascending id."""
    return Schedule(tuple(sorted(range(society.n), key=lambda v: (-society.areas[v].p, v))))


def greedy_strategy(society: Society, criterion: str = "unconditional") -> Schedule:
    """Repeatedly schedule the remaining area most likely to accept.

    ``"unconditional"`` ranks areas by ``p`` alone. ``"positional"`` ranks by
    the probability of accepting at the next position, given the exact
    distribution of the deployment number produced by the prefix chosen so
    far. Both start with the highest-``p`` area; ties go to the lowest id.
    """
    if criterion == "unconditional":
        return sorted_strategy(society)
    if criterion != "positional":
        raise ValidationError(f"unknown greedy criterion {criterion!r}", "criterion")
    n = society.n
    xs = np.arange(-n, n + 1)
    row = np.zeros(2 * n + 1)
    row[n] = 1.0
    remaining = list(range(n))
    order = []
    while remaining:
        best_v, best_prob = None, -1.0
        for v in remaining:
            accept = acceptance_probability(xs, society.areas[v].p, society.areas[v].c)
            prob = float(row @ accept)
            if prob > best_prob:
                best_v, best_prob = v, prob
        area = society.areas[best_v]
        row = step_distribution(row, acceptance_probability(xs, area.p, area.c))
        order.append(best_v)
        remaining.remove(best_v)
    return Schedule(tuple(order))


def multinomial(counts: Sequence[int]) -> int:
    total, out = 0, 1
    for c in counts:
        total += c
        out *= math.comb(total, c)
    return out


def type_sequences(counts: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All distinct arrangements of a multiset of types, in lexicographic order."""
    counts = list(counts)
    n = sum(counts)
    seq: list[int] = []

    def extend():
        if len(seq) == n:
            yield tuple(seq)
            return
        for i, c in enumerate(counts):
            if c:
                counts[i] -= 1
                seq.append(i)
                yield from extend()
                seq.pop()
                counts[i] += 1

    yield from extend()


def switch_count(seq: Sequence[int]) -> int:
    return sum(1 for a, b in zip(seq, seq[1:]) if a != b)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0, *cuts, total)
        yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


def limited_switch_sequences(counts: Sequence[int], sigma: int) -> list[tuple[int, ...]]:
    """Two-type sequences with at most ``sigma`` switches, lexicographically sorted."""
    a, b = counts
    if a == 0 or b == 0:
        return [(0,) * a + (1,) * b]
    found = []
    for runs in range(2, min(sigma + 1, 2 * min(a, b) + 1) + 1):
        for first in (0, 1):
            firsts, seconds = (runs + 1) // 2, runs // 2
            n_first, n_second = (a, b) if first == 0 else (b, a)
            for comp_first in _compositions(n_first, firsts):
                for comp_second in _compositions(n_second, seconds):
                    seq: list[int] = []
                    for j in range(runs):
                        length = comp_first[j // 2] if j % 2 == 0 else comp_second[j // 2]
                        seq.extend([first if j % 2 == 0 else 1 - first] * length)
                    found.append(tuple(seq))
    return sorted(found)


def count_limited_switch_sequences(counts: Sequence[int], sigma: int) -> int:
    a, b = counts
    if a == 0 or b == 0:
        return 1
    total = 0
    for runs in range(2, sigma + 2):
        firsts, seconds = (runs + 1) // 2, runs // 2
        for n_first, n_second in ((a, b), (b, a)):
            if firsts <= n_first and seconds <= n_second:
                total += math.comb(n_first - 1, firsts - 1) * math.comb(n_second - 1, seconds - 1)
    return total


def _best_of(profiles: Sequence[TypeProfile], sequences, chunk: int = 4096) -> tuple[tuple[int, ...], float]:
    """Maximum value over sequences given in lexicographic order; first max wins."""
    ps = np.array([prof.p for prof in profiles])
    cs = np.array([prof.c for prof in profiles])
    best_seq, best_val = None, -math.inf
    it = iter(sequences)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            break
        idx = np.array(block)
        vals = expected_adopters_batch(ps[idx], cs[idx])
        j = int(vals.argmax())
        if vals[j] > best_val:
            best_seq, best_val = block[j], float(vals[j])
    return best_seq, best_val


def exhaustive_nonadaptive(
    profiles: Sequence[TypeProfile], cap: int = ENUMERATION_CAP
) -> tuple[tuple[int, ...], float]:
    """Best type sequence over all distinct arrangements.

    Ties resolve to the lexicographically smallest sequence.
    """
    profiles = check_profiles(profiles)
    counts = [prof.count for prof in profiles]
    total = multinomial(counts)
    if total > cap:
        raise CapExceededError(f"{total} distinct type sequences exceeds cap {cap}")
    return _best_of(profiles, type_sequences(counts))


def best_sigma_switch(
    profiles: Sequence[TypeProfile], sigma: int, cap: int = ENUMERATION_CAP
) -> tuple[tuple[int, ...], float]:
    """Best two-type sequence that changes type at most ``sigma`` times."""
    profiles = check_profiles(profiles)
    if len(profiles) > 2:
        raise ValidationError("switch-limited search supports at most two types", "types")
    if sigma < 0:
        raise ValidationError("sigma must be >= 0", "sigma")
    counts = [prof.count for prof in profiles]
    if len(counts) == 1:
        return (0,) * counts[0], _best_of(profiles, [(0,) * counts[0]])[1]
    total = count_limited_switch_sequences(counts, sigma)
    if total == 0:
        raise InfeasibleError(f"no arrangement of {counts} has at most {sigma} switches")
    if total > cap:
        raise CapExceededError(f"{total} candidate sequences exceeds cap {cap}")
    return _best_of(profiles, limited_switch_sequences(counts, sigma))


def sequence_schedule(profiles: Sequence[TypeProfile], seq: Sequence[int]) -> Schedule:
    """Schedule over ``expand_types(profiles)`` realizing a type sequence."""
    starts = np.concatenate([[0], np.cumsum([prof.count for prof in profiles])])
    taken = [0] * len(profiles)
    order = []
    for i in seq:
        order.append(int(starts[i]) + taken[i])
        taken[i] += 1
    return Schedule(tuple(order))


def schedule_types(profiles: Sequence[TypeProfile], schedule: Schedule) -> tuple[int, ...]:
    """Type sequence of a schedule over ``expand_types(profiles)``."""
    owner = [i for i, prof in enumerate(profiles) for _ in range(prof.count)]
    return tuple(owner[v] for v in schedule.order)


# --- random thresholds ------------------------------------------------------


@dataclass(frozen=True)
class ThresholdDistribution:
    """Finite distribution of thresholds: ``support`` holds ``(c, weight)`` pairs."""

    support: tuple[tuple[int, float], ...]

    def __post_init__(self):
        support = tuple((int(c), float(w)) for c, w in self.support)
        object.__setattr__(self, "support", support)
        if not support:
            raise ValidationError("threshold distribution is empty", "support")
        values = [c for c, _ in support]
        if len(set(values)) != len(values):
            raise ValidationError("threshold values must be distinct", "support")
        if any(c < 1 for c in values):
            raise ValidationError("thresholds must be >= 1", "support")
        if any(w < 0 for _, w in support):
            raise ValidationError("weights must be nonnegative", "support")
        if abs(sum(w for _, w in support) - 1.0) > 1e-12:
            raise ValidationError("weights must sum to 1", "support")

    @property
    def values(self) -> np.ndarray:
        return np.array([c for c, _ in self.support])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.support])


def evaluate_random_thresholds(
    ps: Sequence[float],
    dist: ThresholdDistribution,
    schedule: Schedule,
    cap: int = ENUMERATION_CAP,
    chunk: int = 8192,
) -> float:
    """Expected adopters when every threshold is drawn independently from ``dist``.

    Enumerates every threshold assignment and weights the exact value of each.
    """
    n = len(ps)
    if len(schedule) != n:
        raise ValidationError(f"schedule has {len(schedule)} entries but there are {n} areas", "order")
    m = len(dist.support)
    if m**n > cap:
        raise CapExceededError(f"{m}^{n} threshold assignments exceeds cap {cap}")
    seq_ps = np.asarray(ps, dtype=float)[list(schedule.order)]
    values, weights = dist.values, dist.weights
    total = 0.0
    it = itertools.product(range(m), repeat=n)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            break
        idx = np.array(block)
        w = np.prod(weights[idx], axis=1)
        total += float(w @ expected_adopters_batch(seq_ps, values[idx]))
    return total


def evaluate_random_thresholds_dp(ps: Sequence[float], dist: ThresholdDistribution, schedule: Schedule) -> float:
    """Same quantity as ``evaluate_random_thresholds`` in polynomial time.

    Each threshold is consulted once and is independent of the past, so the
    deployment number stays a Markov chain whose acceptance probability is
    averaged over the threshold distribution.
    """
    n = len(ps)
    if len(schedule) != n:
        raise ValidationError(f"schedule has {len(schedule)} entries but there are {n} areas", "order")
    xs = np.arange(-n, n + 1)
    row = np.zeros(2 * n + 1)
    row[n] = 1.0
    for v in schedule.order:
        accept = sum(w * acceptance_probability(xs, ps[v], c) for c, w in dist.support)
        row = step_distribution(row, accept)
    return float((row @ xs + n) / 2.0)


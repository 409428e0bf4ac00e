"""Exact expected-adopter computations.

Full propagation admits a dynamic program over the distribution of the
deployment number ``I_k`` (accepts minus rejects after ``k`` decisions).
Any topology can be evaluated by enumerating all ``2^n`` preference
vectors, which is what ``evaluate_bruteforce`` does for small ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cascade import simulate_batch
from .model import CapExceededError, Schedule, Society, TopologyError

BRUTEFORCE_CAP = 20


def acceptance_probability(balance: np.ndarray, p, c) -> np.ndarray:
    """Probability that an area with ``(p, c)`` accepts given deployment number ``balance``.

    Arguments broadcast, so ``p`` and ``c`` may be per-row arrays.
    """
    return np.where(balance >= c, 1.0, np.where(balance <= -c, 0.0, p))


def step_distribution(rows: np.ndarray, accept: np.ndarray) -> np.ndarray:
    """Advance distributions over ``x = -n..n`` (last axis) by one decision.

    ``accept[..., j]`` is the probability of accepting from state ``x_j``.
    Mass never reaches the outer columns because ``|I_k| <= k < n``.
    """
    out = np.zeros_like(rows)
    out[..., 1:] += rows[..., :-1] * accept[..., :-1]
    out[..., :-1] += rows[..., 1:] * (1.0 - accept[..., 1:])
    return out


def final_distributions(ps: np.ndarray, cs: np.ndarray) -> np.ndarray:
    """Distribution of ``I_n`` for a batch of scheduled parameter sequences.

    ``ps[b, t]`` and ``cs[b, t]`` describe the area at position ``t`` of
    sequence ``b``; either may be 1-D to share it across the batch. Returns
    an array of shape ``(B, 2n + 1)``.
    """
    ps, cs = np.broadcast_arrays(np.atleast_2d(np.asarray(ps, dtype=float)), np.atleast_2d(cs))
    batch, n = ps.shape
    xs = np.arange(-n, n + 1)
    rows = np.zeros((batch, 2 * n + 1))
    rows[:, n] = 1.0
    for k in range(n):
        accept = acceptance_probability(xs[None, :], ps[:, k : k + 1], cs[:, k : k + 1])
        rows = step_distribution(rows, accept)
    return rows


def expected_adopters_batch(ps: np.ndarray, cs: np.ndarray) -> np.ndarray:
    rows = final_distributions(ps, cs)
    n = (rows.shape[1] - 1) // 2
    return (rows @ np.arange(-n, n + 1) + n) / 2.0


@dataclass(frozen=True)
class DistributionMatrix:
    """``cells[k - 1, x + n] = Pr(I_k = x)`` for ``k = 1..n`` and ``x = -n..n``."""

    n: int
    cells: np.ndarray

    def prob(self, k: int, x: int) -> float:
        if not 1 <= k <= self.n or abs(x) > self.n:
            return 0.0
        return float(self.cells[k - 1, x + self.n])

    def row(self, k: int) -> np.ndarray:
        return self.cells[k - 1]

    @property
    def support(self) -> np.ndarray:
        return np.arange(-self.n, self.n + 1)

    def expected_balance(self, k: int | None = None) -> float:
        k = self.n if k is None else k
        return float(self.row(k) @ self.support)

    def expected_adopters(self) -> float:
        return (self.expected_balance() + self.n) / 2.0

    def tail_masses(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """``(ge, le)`` with ``ge[x] = Pr(I_k >= x)`` and ``le[x] = Pr(I_k <= -x)`` for x = 0..n."""
        row = self.row(k)
        n = self.n
        upper = np.cumsum(row[::-1])[::-1]  # upper[j] = Pr(I_k >= j - n)
        lower = np.cumsum(row)  # lower[j] = Pr(I_k <= j - n)
        xs = np.arange(n + 1)
        return upper[xs + n], lower[n - xs]


def _params(society: Society, schedule: Schedule) -> tuple[np.ndarray, np.ndarray]:
    schedule.check_against(society)
    order = list(schedule.order)
    return np.asarray(society.p)[order], np.asarray(society.c)[order]


def _require_complete(society: Society) -> None:
    if not society.is_complete:
        raise TopologyError(
            "the distribution DP only covers full propagation; use evaluate_bruteforce "
            "(small n) or monte_carlo for a partial-propagation society"
        )


def distribution_dp(society: Society, schedule: Schedule) -> DistributionMatrix:
    _require_complete(society)
    ps, cs = _params(society, schedule)
    n = society.n
    xs = np.arange(-n, n + 1)
    cells = np.zeros((n, 2 * n + 1))
    row = np.zeros(2 * n + 1)
    row[n] = 1.0
    for k in range(n):
        row = step_distribution(row, acceptance_probability(xs, ps[k], cs[k]))
        cells[k] = row
    return DistributionMatrix(n, cells)


def evaluate_dp(society: Society, schedule: Schedule) -> float:
    return distribution_dp(society, schedule).expected_adopters()


def sequence_value(ps: Sequence[float], cs: Sequence[int]) -> float:
    """Expected adopters when the areas ``(ps[t], cs[t])`` are scheduled in order."""
    return float(expected_adopters_batch(np.asarray(ps, dtype=float), np.asarray(cs))[0])


def acceptance_probabilities_bruteforce(
    society: Society, schedule: Schedule, cap: int = BRUTEFORCE_CAP, chunk_bits: int = 14
) -> np.ndarray:
    """``Pr(X_v = 1)`` for every area, by summing over all preference vectors.

    Areas with ``p`` equal to 0 or 1 have a certain preference, so only the
    remaining areas are enumerated; ``cap`` bounds their number.
    """
    schedule.check_against(society)
    n = society.n
    p = np.asarray(society.p)
    free = np.flatnonzero((p > 0.0) & (p < 1.0))
    m = len(free)
    if m > cap:
        raise CapExceededError(f"brute force over 2^{m} preference vectors exceeds cap of {cap} random areas")
    base = p >= 1.0
    bits = np.arange(m)
    chunk = 1 << min(m, chunk_bits)
    total = np.zeros(n)
    for start in range(0, 1 << m, chunk):
        codes = np.arange(start, start + chunk, dtype=np.int64)
        drawn = ((codes[:, None] >> bits) & 1).astype(bool)
        prefs = np.repeat(base[None, :], chunk, axis=0)
        prefs[:, free] = drawn
        weights = np.prod(np.where(drawn, p[free], 1.0 - p[free]), axis=1)
        accepted = simulate_batch(society, schedule, prefs) == 1
        total += weights @ accepted
    return total


def evaluate_bruteforce(society: Society, schedule: Schedule, cap: int = BRUTEFORCE_CAP) -> float:
    return float(acceptance_probabilities_bruteforce(society, schedule, cap).sum())


def tail_ratio_report(matrix: DistributionMatrix) -> list[tuple[int, int, float, float]]:
    """``(k, x, Pr(I_k >= x), Pr(I_k <= -x))`` for every ``k`` and ``1 <= x <= k``."""
    out = []
    for k in range(1, matrix.n + 1):
        ge, le = matrix.tail_masses(k)
        out.extend((k, x, float(ge[x]), float(le[x])) for x in range(1, k + 1))
    return out


def dominates(row_a: np.ndarray, row_b: np.ndarray, tol: float = 1e-12) -> bool:
    """First-order stochastic dominance of distribution ``row_a`` over ``row_b``."""
    upper_a = np.cumsum(row_a[::-1])[::-1]
    upper_b = np.cumsum(row_b[::-1])[::-1]
    return bool(np.all(upper_a >= upper_b - tol))

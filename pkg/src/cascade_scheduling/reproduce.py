"""Named reproduction targets for the worked examples and claims.

Each target builds its instance, prints computed values next to the expected
ones, and emits one ``PASS``/``FAIL`` line per check.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .exact import distribution_dp, evaluate_bruteforce, evaluate_dp, tail_ratio_report
from .model import Schedule, Society, TypeProfile, expand_types
from .strategy import (
    ThresholdDistribution,
    best_sigma_switch,
    evaluate_random_thresholds,
    exhaustive_nonadaptive,
    greedy_strategy,
    optimal_adaptive,
    schedule_types,
    sequence_schedule,
    sorted_strategy,
)

TOL = 1e-12


def fmt(x: float) -> str:
    return f"{x:.12f}"


def tup(xs) -> str:
    return "(" + ",".join(str(x) for x in xs) + ")"


class Report:
    def __init__(self):
        self.lines: list[str] = []
        self.failures = 0

    def say(self, line: str) -> None:
        self.lines.append(line)

    def check(self, label: str, ok: bool) -> None:
        self.lines.append(f"{'PASS' if ok else 'FAIL'} {label}")
        self.failures += not ok

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def example1(report: Report, seed: int) -> None:
    society = Society.from_params([0.2, 0.5, 0.8], [1, 2, 3])
    for order, expected in (((0, 1, 2), 1.5), ((2, 0, 1), 2.4)):
        value = evaluate_dp(society, Schedule(order))
        report.say(f"pi={tup(order)} value={fmt(value)}")
        report.check(f"pi={tup(order)} expected={fmt(expected)}", abs(value - expected) <= TOL)
    dist = distribution_dp(society, Schedule((2, 0, 1)))
    report.check(
        "pi=(2,0,1) Pr(I_3=3)=0.8 Pr(I_3=-3)=0.2",
        abs(dist.prob(3, 3) - 0.8) <= TOL and abs(dist.prob(3, -3) - 0.2) <= TOL,
    )
    order = sorted_strategy(society).order
    report.say(f"sorted={tup(order)} value={fmt(evaluate_dp(society, Schedule(order)))}")
    value, _ = optimal_adaptive([TypeProfile(a.p, a.c, 1) for a in society.areas])
    report.say(f"adaptive value={fmt(value)}")
    report.check("adaptive >= 2.4", value >= 2.4 - 1e-9)


def example2(report: Report, seed: int) -> None:
    for p1, p2 in ((0.4, 0.3), (0.8, 0.7)):
        society = Society.from_params([p1, p2, 0.0], [1, 2, 2])
        pi = evaluate_dp(society, Schedule((0, 1, 2)))
        pi_prime = evaluate_dp(society, Schedule((1, 0, 2)))
        report.say(f"p1={p1} p2={p2} pi=(0,1,2) value={fmt(pi)} pi'=(1,0,2) value={fmt(pi_prime)}")
        report.check(f"p1={p1} p2={p2} pi=p1+p2+p1*p2={fmt(p1 + p2 + p1 * p2)}", abs(pi - (p1 + p2 + p1 * p2)) <= TOL)
        report.check(f"p1={p1} p2={p2} pi'=3*p2={fmt(3 * p2)}", abs(pi_prime - 3 * p2) <= TOL)
        report.check(f"p1={p1} p2={p2} pi' beats pi", pi_prime > pi)
        greedy = greedy_strategy(society).order
        report.check(f"p1={p1} p2={p2} greedy={tup(greedy)} is (0,1,2)", greedy == (0, 1, 2))


def example3_graphs(p: float) -> tuple[Society, Society]:
    star = ((0, 3), (1, 3), (2, 3))
    return (
        Society.from_params([p] * 4, [1] * 4, star),
        Society.from_params([p] * 4, [1] * 4, star + ((0, 1),)),
    )


def example3(report: Report, seed: int) -> None:
    schedule = Schedule.identity(4)
    for p in (0.3, 0.6, 0.9):
        g, g_prime = example3_graphs(p)
        vg, vgp = evaluate_bruteforce(g, schedule), evaluate_bruteforce(g_prime, schedule)
        expect_g = 3 * p + 3 * p**2 * (1 - p) + p**3
        report.say(f"p={p} G value={fmt(vg)} G' value={fmt(vgp)}")
        report.check(f"p={p} G=3p+3p^2(1-p)+p^3={fmt(expect_g)}", abs(vg - expect_g) <= TOL)
        report.check(f"p={p} G'=4p={fmt(4 * p)}", abs(vgp - 4 * p) <= TOL)
        report.check(f"p={p} (G > G') == (0.5 < p < 1)", (vg > vgp) == (0.5 < p < 1))


GREEDY_TYPES = (TypeProfile(0.49, 11, 7), TypeProfile(0.3, 1, 3))
GREEDY_CLAIMED_SEQUENCE = (1, 1, 1, 0, 0, 0, 0, 0, 0, 0)


def greedy(report: Report, seed: int) -> None:
    society = expand_types(GREEDY_TYPES)
    schedule = greedy_strategy(society)
    greedy_value = evaluate_dp(society, schedule)
    report.say(f"greedy sequence={tup(schedule_types(GREEDY_TYPES, schedule))} value={fmt(greedy_value)}")
    best_seq, best_value = exhaustive_nonadaptive(GREEDY_TYPES)
    report.say(f"exhaustive sequence={tup(best_seq)} value={fmt(best_value)}")
    claimed = evaluate_dp(society, sequence_schedule(GREEDY_TYPES, GREEDY_CLAIMED_SEQUENCE))
    report.say(f"claimed optimum {tup(GREEDY_CLAIMED_SEQUENCE)} (1-based {tup(i + 1 for i in GREEDY_CLAIMED_SEQUENCE)}) value={fmt(claimed)}")
    report.check("greedy starts with type 0", schedule_types(GREEDY_TYPES, schedule)[0] == 0)
    report.check("exhaustive beats greedy", best_value > greedy_value)
    report.check(f"exhaustive sequence is {tup(GREEDY_CLAIMED_SEQUENCE)}", best_seq == GREEDY_CLAIMED_SEQUENCE)


SWITCH_TYPES = (TypeProfile(0.8, 1, 4), TypeProfile(0.8, 2, 4))


def switch(report: Report, seed: int) -> None:
    alternating = (0, 1) * 4
    alt_value = evaluate_dp(expand_types(SWITCH_TYPES), sequence_schedule(SWITCH_TYPES, alternating))
    report.say(f"alternating sequence={tup(alternating)} value={fmt(alt_value)}")
    previous = -math.inf
    monotone = True
    for sigma in range(1, 8):
        seq, value = best_sigma_switch(SWITCH_TYPES, sigma)
        report.say(f"sigma={sigma} sequence={tup(seq)} value={fmt(value)}")
        monotone &= value >= previous - 1e-12
        previous = value
        if sigma == 1:
            report.check("alternating beats every 1-switch sequence by > 1e-6", alt_value - value > 1e-6)
    report.check("best value non-decreasing in sigma", monotone)
    _, best = exhaustive_nonadaptive(SWITCH_TYPES)
    report.check("sigma=7 matches exhaustive", abs(previous - best) <= 1e-12)


def theorem1_sweep(rng: np.random.Generator, instances: int = 200, max_n: int = 10):
    """Yield ``(p, n, value, matrix)`` for random uniform-p complete instances."""
    for _ in range(instances):
        n = int(rng.integers(1, max_n + 1))
        p = float(rng.random())
        society = Society.from_params([p] * n, rng.integers(1, n + 1, size=n).tolist())
        schedule = Schedule(tuple(int(v) for v in rng.permutation(n)))
        matrix = distribution_dp(society, schedule)
        yield p, n, matrix.expected_adopters(), matrix


def tail_bound_holds(matrix, p: float, tol: float = 1e-9) -> bool:
    ratio = p / (1.0 - p)
    return all(ge <= ratio * le + tol for _, _, ge, le in tail_ratio_report(matrix))


def theorem1(report: Report, seed: int) -> None:
    rng = np.random.default_rng(seed)
    bound_ok = tails_ok = 0
    total = 0
    for p, n, value, matrix in theorem1_sweep(rng):
        total += 1
        if p >= 0.5:
            bound_ok += value >= n * p - 1e-9
        else:
            bound_ok += value <= n * p + 1e-9
        tails_ok += p >= 0.5 or tail_bound_holds(matrix, p)
    report.say(f"instances={total} seed={seed}")
    report.check(f"np bound holds on {bound_ok}/{total}", bound_ok == total)
    report.check(f"tail ratio bound holds on {tails_ok}/{total}", tails_ok == total)


def random_threshold_instance(rng: np.random.Generator, max_n: int = 6, max_support: int = 3):
    n = int(rng.integers(1, max_n + 1))
    ps = rng.random(n).round(3).tolist()
    size = int(rng.integers(1, max_support + 1))
    values = sorted(rng.choice(np.arange(1, n + 2), size=min(size, n + 1), replace=False).tolist())
    weights = rng.dirichlet(np.ones(len(values)))
    weights[-1] = 1.0 - weights[:-1].sum()
    return ps, ThresholdDistribution(tuple(zip(values, weights.tolist())))


def sorted_beats_all(ps, dist) -> tuple[bool, float, float]:
    n = len(ps)
    society = Society.from_params(ps, [1] * n)
    best_sorted = evaluate_random_thresholds(ps, dist, sorted_strategy(society))
    best_other = max(evaluate_random_thresholds(ps, dist, Schedule(perm)) for perm in itertools.permutations(range(n)))
    return best_sorted >= best_other - 1e-9, best_sorted, best_other


def theorem3(report: Report, seed: int) -> None:
    rng = np.random.default_rng(seed)
    wins = 0
    instances = 20
    for _ in range(instances):
        ps, dist = random_threshold_instance(rng)
        wins += sorted_beats_all(ps, dist)[0]
    report.say(f"instances={instances} seed={seed}")
    report.check(f"sorted order optimal over all permutations on {wins}/{instances}", wins == instances)


TARGETS = {
    "example1": example1,
    "example2": example2,
    "example3": example3,
    "greedy": greedy,
    "switch": switch,
    "theorem1": theorem1,
    "theorem3": theorem3,
}


def reproduce(name: str, seed: int = 0) -> Report:
    if name not in TARGETS:
        raise KeyError(f"unknown reproduction target {name!r}; choose from {', '.join(TARGETS)}")
    report = Report()
    TARGETS[name](report, seed)
    return report

"""Reduction from vertex-failure s-t reliability on a DAG to a cascade instance.

Every non-source vertex ``v`` becomes three areas, scheduled consecutively in
topological order:

* ``b_v`` (blocking): ``p = 1``, ``c = indegree(v)``; adjacent to ``u'`` for
  each DAG edge ``(u, v)``. It rejects only when every predecessor rejected.
* ``f_v`` (forwarding): ``p = p``; its one neighbour ``v'`` comes later, so it
  decides on its own coin. It plays the role of ``v`` surviving.
* ``v'``: ``p = 0``, ``c = 2``; adjacent to ``b_v`` and ``f_v`` only, so it
  accepts exactly when both of them did.

The source becomes a single area ``s'`` with ``p = p`` scheduled first. With
this construction ``Pr(X_v' = 1)`` equals the probability that a path of
surviving vertices joins ``s`` to ``v`` when ``s`` itself survives with
probability ``p``.
"""
from __future__ import annotations

import heapq
import json
from dataclasses import dataclass

import numpy as np

from .exact import BRUTEFORCE_CAP, acceptance_probabilities_bruteforce
from .model import Area, CapExceededError, Schedule, Society, ValidationError

RELIABILITY_CAP = 20


@dataclass(frozen=True)
class ReliabilityInstance:
    m: int
    edges: tuple[tuple[int, int], ...]
    s: int
    t: int
    p: float

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        if self.m < 2:
            raise ValidationError("a reliability instance needs at least two vertices", "m")
        for j, (u, v) in enumerate(self.edges):
            if not (0 <= u < self.m and 0 <= v < self.m):
                raise ValidationError("bad edge endpoint", f"edges[{j}]")
            if u == v:
                raise ValidationError("self-loop", f"edges[{j}]")
        if len(set(self.edges)) != len(self.edges):
            raise ValidationError("duplicate edge", "edges")
        for name in ("s", "t"):
            if not 0 <= getattr(self, name) < self.m:
                raise ValidationError("vertex out of range", name)
        if self.s == self.t:
            raise ValidationError("source and terminal coincide", "t")
        if any(u == self.t for u, _ in self.edges):
            raise ValidationError("terminal must have no outgoing edges", "t")
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError("p out of range", "p")
        self.topological_order()  # raises on cycles

    def predecessors(self) -> list[list[int]]:
        preds: list[list[int]] = [[] for _ in range(self.m)]
        for u, v in self.edges:
            preds[v].append(u)
        return preds

    def topological_order(self) -> tuple[int, ...]:
        """Kahn's algorithm, smallest id first, with ``t`` held back to the end."""
        indeg = [0] * self.m
        succ: list[list[int]] = [[] for _ in range(self.m)]
        for u, v in self.edges:
            indeg[v] += 1
            succ[u].append(v)
        ready = [v for v in range(self.m) if indeg[v] == 0 and v != self.t]
        heapq.heapify(ready)
        order = []
        terminal_ready = indeg[self.t] == 0
        while ready or terminal_ready:
            if ready:
                v = heapq.heappop(ready)
            else:
                v, terminal_ready = self.t, False
            order.append(v)
            for w in succ[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    if w == self.t:
                        terminal_ready = True
                    else:
                        heapq.heappush(ready, w)
        if len(order) != self.m:
            raise ValidationError("graph has a cycle", "edges")
        return tuple(order)


@dataclass(frozen=True)
class GadgetInstance:
    instance: ReliabilityInstance
    society: Society
    schedule: Schedule
    # vertex_map[v] = (v', b_v, f_v); the source has no blocking/forwarding areas
    vertex_map: tuple[tuple[int, int | None, int | None], ...]

    def prime(self, v: int) -> int:
        return self.vertex_map[v][0]


def build_gadget(inst: ReliabilityInstance) -> GadgetInstance:
    preds = inst.predecessors()
    if preds[inst.s]:
        raise ValidationError("source must have no incoming edges", "s")
    for v in range(inst.m):
        if v != inst.s and not preds[v]:
            raise ValidationError(f"vertex {v} has indegree 0; only the source may", "edges")

    order = inst.topological_order()
    ps: list[float] = [inst.p]
    cs: list[int] = [1]  # c of s' is never consulted
    vertex_map: list = [None] * inst.m
    vertex_map[inst.s] = (0, None, None)
    for v in order:
        if v == inst.s:
            continue
        b = len(ps)
        ps += [1.0, inst.p, 0.0]
        cs += [len(preds[v]), 1, 2]
        vertex_map[v] = (b + 2, b, b + 1)
    edges = []
    for u, v in inst.edges:
        edges.append((vertex_map[u][0], vertex_map[v][1]))
    for v in range(inst.m):
        prime, b, f = vertex_map[v]
        if b is not None:
            edges += [(b, prime), (f, prime)]
    society = Society(tuple(Area(i, p, c) for i, (p, c) in enumerate(zip(ps, cs))), tuple(edges))
    # ids were assigned in schedule order
    return GadgetInstance(inst, society, Schedule.identity(society.n), tuple(vertex_map))


def reliability_all(inst: ReliabilityInstance, source_operates_randomly: bool = True, cap: int = RELIABILITY_CAP) -> np.ndarray:
    """``R(G, s, v; p)`` for every vertex ``v``, by enumerating failure patterns."""
    if inst.m > cap:
        raise CapExceededError(f"reliability enumeration over 2^{inst.m} patterns exceeds cap m <= {cap}")
    probs = np.full(inst.m, inst.p)
    if not source_operates_randomly:
        probs[inst.s] = 1.0
    codes = np.arange(1 << inst.m, dtype=np.int64)
    alive = ((codes[:, None] >> np.arange(inst.m)) & 1).astype(bool)
    weights = np.prod(np.where(alive, probs, 1.0 - probs), axis=1)
    preds = inst.predecessors()
    reach = np.zeros_like(alive)
    for v in inst.topological_order():
        if v == inst.s:
            reach[:, v] = alive[:, v]
        elif preds[v]:
            reach[:, v] = alive[:, v] & reach[:, preds[v]].any(axis=1)
    return weights @ reach


def reliability_bruteforce(
    inst: ReliabilityInstance,
    source_operates_randomly: bool = True,
    target: int | None = None,
    cap: int = RELIABILITY_CAP,
) -> float:
    target = inst.t if target is None else target
    return float(reliability_all(inst, source_operates_randomly, cap)[target])


def lambda_decomposition(g: GadgetInstance, cap: int = BRUTEFORCE_CAP) -> tuple[float, float]:
    """Total expected adopters ``Lambda`` and ``alpha = sum over v != s of Pr(X_v' = 1)``.

    Also checks ``Lambda = Pr(X_s' = 1) + sum_v (Pr(X_v' = 1) (1 + 1/p) + p)``.
    """
    p = g.instance.p
    if p == 0:
        raise ValidationError("the decomposition divides by p, which is 0", "p")
    accept = acceptance_probabilities_bruteforce(g.society, g.schedule, cap)
    total = float(accept.sum())
    primes = [accept[g.prime(v)] for v in range(g.instance.m) if v != g.instance.s]
    alpha = float(sum(primes))
    rebuilt = float(accept[g.prime(g.instance.s)]) + sum(x * (1.0 + 1.0 / p) + p for x in primes)
    if abs(rebuilt - total) > 1e-9:
        raise ArithmeticError(f"decomposition identity fails: {rebuilt} != {total}")
    return total, alpha


def parse_dag(text: str) -> ReliabilityInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc.msg} (line {exc.lineno})") from exc
    if not isinstance(doc, dict):
        raise ValidationError("DAG document must be an object")
    for key in ("m", "edges", "s", "t", "p"):
        if key not in doc:
            raise ValidationError(f"missing key {key!r}", "$")
    for key in ("m", "s", "t"):
        if isinstance(doc[key], bool) or not isinstance(doc[key], int):
            raise ValidationError(f"{key} must be an integer", key)
    if isinstance(doc["p"], bool) or not isinstance(doc["p"], (int, float)):
        raise ValidationError("p must be a number", "p")
    edges = []
    for j, e in enumerate(doc["edges"]):
        if not isinstance(e, list) or len(e) != 2 or not all(isinstance(x, int) and not isinstance(x, bool) for x in e):
            raise ValidationError("edge must be a pair of integers", f"edges[{j}]")
        edges.append((e[0], e[1]))
    return ReliabilityInstance(doc["m"], tuple(edges), doc["s"], doc["t"], float(doc["p"]))


def serialize_dag(inst: ReliabilityInstance) -> str:
    return json.dumps({"m": inst.m, "edges": [list(e) for e in inst.edges], "s": inst.s, "t": inst.t, "p": inst.p})

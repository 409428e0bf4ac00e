"""Domain types shared by every other module, plus the JSON file formats.

Area ids are 0-based everywhere. A society with ``edges=None`` uses full
propagation (every pair of areas influences each other); otherwise influence
only flows along the listed undirected edges.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence


class ValidationError(ValueError):
    """Malformed or out-of-range input. ``path`` names the offending field."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{message} at {path}" if path else message)


class InfeasibleError(RuntimeError):
    """The request is well-formed but cannot be carried out as asked."""


class CapExceededError(InfeasibleError):
    """An exhaustive computation would exceed its configured size cap."""


class TopologyError(InfeasibleError):
    """The requested evaluator does not support the society's topology."""


def _check_probability(p, path: str) -> float:
    if isinstance(p, bool) or not isinstance(p, (int, float)):
        raise ValidationError("p must be a number", path)
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError("p out of range", path)
    return p


def _check_threshold(c, path: str) -> int:
    if isinstance(c, bool) or not isinstance(c, int):
        raise ValidationError("c must be an integer", path)
    if c < 1:
        raise ValidationError("c must be >= 1", path)
    return c


@dataclass(frozen=True)
class Area:
    id: int
    p: float
    c: int

    def __post_init__(self):
        _check_probability(self.p, "p")
        _check_threshold(self.c, "c")

    @property
    def q(self) -> float:
        """Probability of an initial preference to reject."""
        return 1.0 - self.p


@dataclass(frozen=True)
class Society:
    """Areas plus an influence topology.

    ``edges`` is ``None`` for the complete graph, else a tuple of normalized
    ``(u, v)`` pairs with ``u < v``.
    """

    areas: tuple[Area, ...]
    edges: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "areas", tuple(self.areas))
        n = len(self.areas)
        if n == 0:
            raise ValidationError("society must contain at least one area", "areas")
        for i, area in enumerate(self.areas):
            if area.id != i:
                raise ValidationError(f"area ids must be 0..{n - 1} in order", f"areas[{i}].id")
        if self.edges is not None:
            seen = set()
            normalized = []
            for j, (u, v) in enumerate(self.edges):
                for end in (u, v):
                    if isinstance(end, bool) or not isinstance(end, int) or not 0 <= end < n:
                        raise ValidationError("bad edge endpoint", f"graph.edges[{j}]")
                if u == v:
                    raise ValidationError("self-loop", f"graph.edges[{j}]")
                key = (min(u, v), max(u, v))
                if key in seen:
                    raise ValidationError("duplicate edge", f"graph.edges[{j}]")
                seen.add(key)
                normalized.append(key)
            object.__setattr__(self, "edges", tuple(sorted(normalized)))

    @property
    def n(self) -> int:
        return len(self.areas)

    @property
    def is_complete(self) -> bool:
        return self.edges is None

    @property
    def p(self) -> tuple[float, ...]:
        return tuple(a.p for a in self.areas)

    @property
    def c(self) -> tuple[int, ...]:
        return tuple(a.c for a in self.areas)

    @cached_property
    def neighbors(self) -> tuple[frozenset[int], ...]:
        if self.edges is None:
            everyone = frozenset(range(self.n))
            return tuple(everyone - {v} for v in range(self.n))
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(s) for s in adj)

    def explicit(self) -> Society:
        """The same society with its complete topology spelled out as edges."""
        if self.edges is not None:
            return self
        pairs = tuple((u, v) for u in range(self.n) for v in range(u + 1, self.n))
        return Society(self.areas, pairs)

    @classmethod
    def from_params(cls, ps: Sequence[float], cs: Sequence[int], edges=None) -> Society:
        if len(ps) != len(cs):
            raise ValidationError("p and c vectors differ in length")
        return cls(tuple(Area(i, p, c) for i, (p, c) in enumerate(zip(ps, cs))), edges)


@dataclass(frozen=True)
class Schedule:
    """``order[t - 1]`` is the area scheduled at time ``t``."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(self.order)
        object.__setattr__(self, "order", order)
        if sorted(order) != list(range(len(order))):
            raise ValidationError("order must be a permutation of 0..n-1", "order")

    def __len__(self):
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    @classmethod
    def identity(cls, n: int) -> Schedule:
        return cls(tuple(range(n)))

    def check_against(self, society: Society) -> None:
        if len(self.order) != society.n:
            raise ValidationError(
                f"schedule has {len(self.order)} entries but society has {society.n} areas", "order"
            )


@dataclass(frozen=True)
class TypeProfile:
    p: float
    c: int
    count: int = 1

    def __post_init__(self):
        _check_probability(self.p, "p")
        _check_threshold(self.c, "c")
        if isinstance(self.count, bool) or not isinstance(self.count, int) or self.count < 0:
            raise ValidationError("count must be a nonnegative integer", "count")


def check_profiles(profiles: Sequence[TypeProfile]) -> tuple[TypeProfile, ...]:
    """Validate a typed population: distinct (p, c) pairs, at least one area."""
    profiles = tuple(profiles)
    seen = {}
    for i, prof in enumerate(profiles):
        key = (prof.p, prof.c)
        if key in seen:
            raise ValidationError(f"type duplicates types[{seen[key]}]", f"types[{i}]")
        seen[key] = i
    if sum(prof.count for prof in profiles) < 1:
        raise ValidationError("population is empty", "types")
    return profiles


def expand_types(profiles: Sequence[TypeProfile]) -> Society:
    """Materialize a typed population as a complete-topology society.

    Ids are assigned profile by profile, in input order.
    """
    profiles = check_profiles(profiles)
    ps, cs = [], []
    for prof in profiles:
        ps.extend([prof.p] * prof.count)
        cs.extend([prof.c] * prof.count)
    return Society.from_params(ps, cs)


def society_from_sequence(profiles: Sequence[TypeProfile], sequence: Iterable[int]) -> Society:
    """Complete society whose area ``t`` has the type ``sequence[t]``."""
    seq = list(sequence)
    return Society.from_params([profiles[i].p for i in seq], [profiles[i].c for i in seq])


# --- file formats -----------------------------------------------------------


def _load(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc.msg} (line {exc.lineno})") from exc


def _require(doc, key: str, kind, path: str):
    if not isinstance(doc, dict) or key not in doc:
        raise ValidationError(f"missing key {key!r}", path or "$")
    value = doc[key]
    if not isinstance(value, kind):
        raise ValidationError(f"{key!r} has the wrong type", f"{path}.{key}" if path else key)
    return value


def parse_society(text: str) -> Society:
    doc = _load(text)
    raw_areas = _require(doc, "areas", list, "")
    if not raw_areas:
        raise ValidationError("society must contain at least one area", "areas")
    by_id: dict[int, Area] = {}
    for i, raw in enumerate(raw_areas):
        path = f"areas[{i}]"
        if not isinstance(raw, dict):
            raise ValidationError("area must be an object", path)
        for key in ("id", "p", "c"):
            if key not in raw:
                raise ValidationError(f"missing key {key!r}", path)
        vid = raw["id"]
        if isinstance(vid, bool) or not isinstance(vid, int):
            raise ValidationError("id must be an integer", f"{path}.id")
        if vid in by_id:
            raise ValidationError("duplicate id", f"{path}.id")
        p = _check_probability(raw["p"], f"{path}.p")
        c = _check_threshold(raw["c"], f"{path}.c")
        by_id[vid] = Area(vid, p, c)
    n = len(by_id)
    for i, raw in enumerate(raw_areas):
        if not 0 <= raw["id"] < n:
            raise ValidationError(f"id must lie in 0..{n - 1}", f"areas[{i}].id")
    areas = tuple(by_id[i] for i in range(n))

    edges = None
    if "graph" in doc:
        raw_edges = _require(_require(doc, "graph", dict, ""), "edges", list, "graph")
        edges = []
        for j, e in enumerate(raw_edges):
            if not isinstance(e, list) or len(e) != 2:
                raise ValidationError("edge must be a pair", f"graph.edges[{j}]")
            edges.append(tuple(e))
    return Society(areas, None if edges is None else tuple(edges))


def serialize_society(society: Society) -> str:
    doc: dict = {"areas": [{"id": a.id, "p": a.p, "c": a.c} for a in society.areas]}
    if society.edges is not None:
        doc["graph"] = {"edges": [list(e) for e in society.edges]}
    return json.dumps(doc)


def parse_schedule(text: str) -> Schedule:
    order = _require(_load(text), "order", list, "")
    for i, v in enumerate(order):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ValidationError("schedule entries must be integers", f"order[{i}]")
    return Schedule(tuple(order))


def serialize_schedule(schedule: Schedule) -> str:
    return json.dumps({"order": list(schedule.order)})


def parse_types(text: str) -> tuple[TypeProfile, ...]:
    raw_types = _require(_load(text), "types", list, "")
    profiles = []
    for i, raw in enumerate(raw_types):
        path = f"types[{i}]"
        if not isinstance(raw, dict):
            raise ValidationError("type must be an object", path)
        for key in ("p", "c", "count"):
            if key not in raw:
                raise ValidationError(f"missing key {key!r}", path)
        p = _check_probability(raw["p"], f"{path}.p")
        c = _check_threshold(raw["c"], f"{path}.c")
        count = raw["count"]
        if isinstance(count, bool) or not isinstance(count, int) or count < 0:
            raise ValidationError("count must be a nonnegative integer", f"{path}.count")
        profiles.append(TypeProfile(p, c, count))
    return check_profiles(profiles)


def serialize_types(profiles: Sequence[TypeProfile]) -> str:
    return json.dumps({"types": [{"p": t.p, "c": t.c, "count": t.count} for t in profiles]})

import json
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cascade_scheduling.model import (
    Schedule,
    Society,
    TypeProfile,
    ValidationError,
    expand_types,
    parse_schedule,
    parse_society,
    parse_types,
    serialize_schedule,
    serialize_society,
    serialize_types,
)


def test_parse_example1_society():
    s = parse_society('{"areas":[{"id":0,"p":0.2,"c":1},{"id":1,"p":0.5,"c":2},{"id":2,"p":0.8,"c":3}]}')
    assert s.is_complete
    assert s.p == (0.2, 0.5, 0.8)
    assert s.c == (1, 2, 3)


def test_parse_single_area():
    s = parse_society('{"areas":[{"id":0,"p":1.0,"c":1}]}')
    assert s.n == 1 and s.areas[0].p == 1.0


def test_parse_p_out_of_range_names_path():
    with pytest.raises(ValidationError, match=r"p out of range at areas\[0\]\.p"):
        parse_society('{"areas":[{"id":0,"p":1.2,"c":1}]}')


@pytest.mark.parametrize(
    "doc, path",
    [
        ('{"areas":[{"id":0,"p":0.5,"c":0}]}', "areas[0].c"),
        ('{"areas":[{"id":0,"p":0.5,"c":1},{"id":0,"p":0.5,"c":1}]}', "areas[1].id"),
        ('{"areas":[{"id":0,"p":0.5,"c":1},{"id":5,"p":0.5,"c":1}]}', "areas[1].id"),
        ('{"areas":[{"id":0,"p":0.5,"c":1},{"id":1,"p":0.5,"c":1}],"graph":{"edges":[[0,2]]}}', "graph.edges[0]"),
        ('{"areas":[{"id":0,"p":0.5,"c":1},{"id":1,"p":0.5,"c":1}],"graph":{"edges":[[0,0]]}}', "graph.edges[0]"),
        ('{"areas":[{"id":0,"p":0.5,"c":1},{"id":1,"p":0.5,"c":1}],"graph":{"edges":[[0,1],[1,0]]}}', "graph.edges[1]"),
        ('{"areas":[{"id":0,"p":"x","c":1}]}', "areas[0].p"),
        ('{"areas":[{"id":0,"c":1}]}', "areas[0]"),
    ],
)
def test_parse_errors_carry_field_path(doc, path):
    with pytest.raises(ValidationError) as info:
        parse_society(doc)
    assert info.value.path == path


def test_parse_malformed_json():
    with pytest.raises(ValidationError, match="malformed"):
        parse_society('{"areas": [')


def test_ids_may_arrive_out_of_order():
    s = parse_society('{"areas":[{"id":1,"p":0.1,"c":2},{"id":0,"p":0.9,"c":1}]}')
    assert s.p == (0.9, 0.1)


def test_explicit_edges_normalized():
    s = parse_society('{"areas":[{"id":0,"p":0.5,"c":1},{"id":1,"p":0.5,"c":1},{"id":2,"p":0.5,"c":1}],"graph":{"edges":[[2,1],[0,1]]}}')
    assert s.edges == ((0, 1), (1, 2))
    assert s.neighbors[1] == {0, 2}


def test_complete_explicit_has_all_pairs(example1):
    assert example1.explicit().edges == ((0, 1), (0, 2), (1, 2))
    assert example1.explicit().neighbors == example1.neighbors


def test_schedule_must_be_permutation():
    with pytest.raises(ValidationError):
        Schedule((0, 0, 1))
    assert parse_schedule('{"order":[2,0,1]}').order == (2, 0, 1)
    with pytest.raises(ValidationError):
        parse_schedule('{"order":[1,2]}')


def test_area_q():
    assert parse_society('{"areas":[{"id":0,"p":0.25,"c":1}]}').areas[0].q == 0.75


def test_expand_types_greedy_instance():
    s = expand_types([TypeProfile(0.49, 11, 7), TypeProfile(0.3, 1, 3)])
    assert s.n == 10 and s.is_complete
    assert s.p == (0.49,) * 7 + (0.3,) * 3
    assert s.c == (11,) * 7 + (1,) * 3


def test_expand_types_skips_empty_profile():
    s = expand_types([TypeProfile(0.5, 1, 0), TypeProfile(0.5, 2, 2)])
    assert [(a.p, a.c) for a in s.areas] == [(0.5, 2), (0.5, 2)]


def test_expand_types_switch_instance():
    s = expand_types([TypeProfile(0.8, 1, 2), TypeProfile(0.8, 2, 2)])
    assert s.c == (1, 1, 2, 2)


def test_expand_types_rejects_empty_population():
    with pytest.raises(ValidationError):
        expand_types([TypeProfile(0.5, 1, 0)])


def test_duplicate_type_rejected():
    with pytest.raises(ValidationError, match="duplicates"):
        parse_types('{"types":[{"p":0.5,"c":1,"count":2},{"p":0.5,"c":1,"count":1}]}')


areas_st = st.lists(
    st.tuples(st.floats(0, 1, allow_nan=False), st.integers(1, 30)), min_size=1, max_size=8
)


@st.composite
def societies(draw):
    params = draw(areas_st)
    n = len(params)
    ps, cs = zip(*params)
    if draw(st.booleans()) or n == 1:
        return Society.from_params(ps, cs)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True))
    return Society.from_params(ps, cs, tuple(edges))


@given(societies())
def test_society_round_trip(s):
    assert parse_society(serialize_society(s)) == s


@given(st.permutations(list(range(7))))
def test_schedule_round_trip(order):
    sch = Schedule(tuple(order))
    assert parse_schedule(serialize_schedule(sch)) == sch


@given(
    st.lists(st.tuples(st.floats(0, 1, allow_nan=False), st.integers(1, 9), st.integers(0, 5)), min_size=1, max_size=4,
             unique_by=lambda t: (t[0], t[1])).filter(lambda ts: sum(t[2] for t in ts) > 0)
)
def test_expand_then_group_recovers_counts(raw):
    profiles = [TypeProfile(p, c, k) for p, c, k in raw]
    grouped = Counter((a.p, a.c) for a in expand_types(profiles).areas)
    assert grouped == Counter({(t.p, t.c): t.count for t in profiles if t.count})
    assert parse_types(serialize_types(profiles)) == tuple(profiles)


def test_types_file_schema():
    doc = json.dumps({"types": [{"p": 0.49, "c": 11, "count": 7}, {"p": 0.3, "c": 1, "count": 3}]})
    assert parse_types(doc) == (TypeProfile(0.49, 11, 7), TypeProfile(0.3, 1, 3))
    with pytest.raises(ValidationError) as info:
        parse_types('{"types":[{"p":0.3,"c":1,"count":-1}]}')
    assert info.value.path == "types[0].count"

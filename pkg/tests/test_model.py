import json
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import one_vertex
from tubular.errors import (DisconnectedSubgraph, DocumentSyntaxError, EmptySelection,
                            InvalidGroup, InvalidParameters, SemanticError, ZeroScalar)
from tubular.exactlat import ZZ2, hnf, intersection_number, vec
from tubular.model import (Edge, TubularGroup, connected_edge_subsets, dumps,
                           group_canonical_key, group_from_json, group_to_json,
                           is_primitive, loads, normalize_tuple, require_valid,
                           scale, snowflake, subtubular, tuple_from_json,
                           tuple_to_json, validate)

F = Fraction


def test_example_group_is_valid(primitive_target):
    assert validate(primitive_target) == []
    assert not is_primitive(primitive_target)


def test_zero_image_is_one_violation():
    G = one_vertex(("s", (1, 0), (0, 0)), ("t", (0, 1), (1, 1)))
    problems = validate(G)
    assert len(problems) == 1 and "zero" in problems[0]
    with pytest.raises(InvalidGroup):
        require_valid(G)


def test_rank_one_lattice_is_one_violation():
    G = one_vertex(("s", (1, 0), (2, 0)), lattice=hnf([vec(1, 0)]))
    problems = validate(G)
    assert len(problems) == 1 and "rank" in problems[0]


def test_other_violations():
    G = TubularGroup([("a", ZZ2), ("b", ZZ2)], [Edge("e", "a", "a", vec(1, 0), vec(0, 1))])
    assert any("disconnected" in p for p in validate(G))
    G = one_vertex(("s", (F(1, 2), 0), (1, 0)))
    assert any("not in lattice" in p for p in validate(G))


def test_edge_sign_normalization():
    e = Edge("e", "v", "v", vec(-1, 2), vec(3, 4))
    assert e.u == vec(1, -2) and e.v == vec(-3, -4)


def test_snowflake():
    G = snowflake(3, 2)
    assert G.vertex_ids == ["v"] and G.lattice("v") == ZZ2
    assert [(e.u, e.v) for e in G.edges] == [(vec(2, 0), vec(3, 1)), (vec(2, 0), vec(3, -1))]
    assert is_primitive(snowflake(1, 1))
    with pytest.raises(InvalidParameters):
        snowflake(1, 2)
    for p in range(1, 21):
        for q in range(1, p + 1):
            assert validate(snowflake(p, q)) == []


def test_scale(recurrent):
    assert scale(recurrent, 1) == recurrent
    with pytest.raises(ZeroScalar):
        scale(recurrent, 0)
    # G' and G'' of the recurrent example: scaling the second by 2 gives the first
    G1 = TubularGroup([("v", hnf([vec(F(1, 2), 0), vec(0, 1)]))],
                      [Edge("s", "v", "v", vec(F(1, 2), 0), vec(1, 2)),
                       Edge("t", "v", "v", vec(0, 1), vec(1, 2))])
    G2 = TubularGroup([("v", hnf([vec(F(1, 4), 0), vec(0, F(1, 2))]))],
                      [Edge("s", "v", "v", vec(F(1, 4), 0), vec(F(1, 2), 1)),
                       Edge("t", "v", "v", vec(0, F(1, 2)), vec(F(1, 2), 1))])
    assert scale(G2, 2) == G1


def test_subtubular(non_recurrent):
    sub = subtubular(non_recurrent, {"s"})
    assert sub == one_vertex(("s", (1, 0), (2, 0)))
    assert subtubular(non_recurrent, {"s", "t"}) == non_recurrent
    with pytest.raises(EmptySelection):
        subtubular(non_recurrent, set())
    with pytest.raises(SemanticError):
        subtubular(non_recurrent, {"x"})


def test_subtubular_disconnected():
    G = TubularGroup([("a", ZZ2), ("b", ZZ2), ("c", ZZ2)],
                     [Edge("e", "a", "b", vec(1, 0), vec(1, 0)),
                      Edge("f", "b", "c", vec(0, 1), vec(0, 1)),
                      Edge("g", "c", "c", vec(1, 1), vec(1, 2))])
    with pytest.raises(DisconnectedSubgraph):
        subtubular(G, {"e", "g"})
    assert connected_edge_subsets(G) == [("e",), ("f",), ("g",), ("e", "f"), ("f", "g")]
    assert connected_edge_subsets(G, proper=False)[-1] == ("e", "f", "g")


def test_json_round_trip():
    G = snowflake(3, 2)
    doc = group_to_json(G)
    assert group_from_json(json.loads(dumps(doc))) == G
    text = dumps(doc)
    assert text == dumps(group_to_json(group_from_json(loads(text))))


def test_json_rationals_and_default_basis():
    doc = {"vertices": [{"id": "v"}],
           "edges": [{"id": "s", "minus": "v", "plus": "v", "u": ["1/2", "-4"], "v": ["1", "0"]}]}
    with pytest.raises(SemanticError):
        group_from_json(doc)  # (1/2,-4) is not in Z^2
    doc["vertices"][0]["basis"] = [["1/2", "0"], ["0", "1"]]
    G = group_from_json(doc)
    assert G.edge("s").u == vec(F(1, 2), -4)


def test_json_errors():
    doc = {"vertices": [{"id": "v"}],
           "edges": [{"id": "s", "minus": "v", "plus": "w", "u": ["1", "0"], "v": ["1", "1"]}]}
    with pytest.raises(SemanticError):
        group_from_json(doc)
    with pytest.raises(DocumentSyntaxError) as exc:
        group_from_json({"vertices": [{"id": "v"}], "edges": [{"id": "s", "minus": "v"}]})
    assert "$.edges[0]" in str(exc.value)
    with pytest.raises(DocumentSyntaxError):
        group_from_json({"vertices": [{"id": "v"}],
                         "edges": [{"id": "s", "minus": "v", "plus": "v", "u": [1.5, "0"], "v": ["1", "1"]}]})
    with pytest.raises(DocumentSyntaxError):
        loads("{not json")


def test_tuples():
    assert normalize_tuple({"s": 4, "t": 6}) == {"s": 2, "t": 3}
    assert tuple_from_json(tuple_to_json({"s": 2, "t": 3})) == {"s": 2, "t": 3}
    with pytest.raises(SemanticError):
        tuple_from_json({"s": "0"})
    with pytest.raises(SemanticError):
        tuple_from_json({"x": "1"}, ["s"])


def test_canonical_key_ignores_generator_choice():
    a = TubularGroup([("v", hnf([vec(1, 3), vec(0, 2)]))], [Edge("e", "v", "v", vec(0, 2), vec(1, 1))])
    b = TubularGroup([("v", hnf([vec(1, 1), vec(0, 2), vec(2, 4)]))], [Edge("e", "v", "v", vec(0, -2), vec(-1, -1))])
    assert group_canonical_key(a) == group_canonical_key(b)


# ------------------------------------------------------------ properties

coord = st.integers(-6, 6)
nz = st.tuples(coord, coord).filter(lambda p: p != (0, 0))
edge_lists = st.lists(st.tuples(nz, nz), min_size=1, max_size=3)
alphas = st.sampled_from([F(1, 3), F(1, 2), F(2), F(5), F(-3, 2)])


def _group(pairs):
    return one_vertex(*[(f"e{i}", u, v) for i, (u, v) in enumerate(pairs)])


@settings(max_examples=1000)
@given(edge_lists, alphas)
def test_scale_preserves_validity_and_primitivity(pairs, alpha):
    G = _group(pairs)
    H = scale(G, alpha)
    assert validate(H) == []
    assert is_primitive(H) == is_primitive(G)
    before = Counter(intersection_number(e.u, e.v) * alpha ** 2 for e in G.edges)
    after = Counter(intersection_number(e.u, e.v) for e in H.edges)
    assert before == after


@settings(max_examples=300)
@given(edge_lists)
def test_round_trip_and_subtubular_validity(pairs):
    G = _group(pairs)
    assert group_from_json(loads(dumps(group_to_json(G)))) == G
    for subset in connected_edge_subsets(G, proper=False):
        assert validate(subtubular(G, subset)) == []

import pytest

from msckit.model import (
    DegreeExceeded, DuplicateId, KripkeModel, NotSimpleGraph, PropositionSet,
    bit_length, graph_to_kripke, model_from_json, model_to_json, validate_model,
)


def make_model(n, edges, valuation, ordinary=(), distinguished=("p1",)):
    return KripkeModel(
        n=n, edges=frozenset(edges),
        valuation={k: frozenset(v) for k, v in valuation.items()},
        props=PropositionSet(ordinary=tuple(ordinary), distinguished=tuple(distinguished)),
    )


def test_validate_single_node():
    m = make_model(1, [], {})
    validate_model(m, 0)


def test_validate_duplicate_ids():
    m = make_model(2, [], {})
    with pytest.raises(DuplicateId):
        validate_model(m, 0)


def test_validate_degree_cycle():
    m = make_model(3, [(0, 1), (1, 2), (2, 0)], {"p1": {1}, "p2": {2}},
                   distinguished=("p1", "p2"))
    validate_model(m, 1)
    with pytest.raises(DegreeExceeded):
        validate_model(m, 0)


def test_neighbor_order_by_id():
    # successor IDs 000, 010, 111 listed in lexicographic order
    m = make_model(4, [(0, 1), (0, 2), (0, 3)],
                   {"p1": {0, 3}, "p2": {2, 3}, "p3": {3}},
                   distinguished=("p1", "p2", "p3"))
    assert [m.identifier(v) for v in m.neighbor_order(0)] == ["000", "010", "111"]
    assert m.neighbor_order(1) == ()
    assert m.neighbor(0, 4) is None


def test_neighbor_order_lexicographic():
    m = make_model(4, [(0, 1), (0, 2), (0, 3)],
                   {"p1": {1, 2}, "p2": {3, 1}},
                   distinguished=("p1", "p2"))
    # succ IDs 11, 01, 10 sort to 01, 10, 11
    assert [m.identifier(v) for v in m.neighbor_order(0)] == ["01", "10", "11"]


def test_local_input_ordering():
    m = make_model(1, [], {"q": {0}, "p2": {0}},
                   ordinary=("q",), distinguished=("p1", "p2"))
    assert m.local_input(0) == "101"
    assert len(m.local_input_bits(0)) == 3
    # the distinguished prefix of the rendered string is the identifier
    assert m.local_input(0)[:2] == m.identifier(0)


def test_graph_to_kripke_single_node():
    m = graph_to_kripke(1, [])
    assert m.props.distinguished == ("p1",)
    assert m.identifier(0) == "1"


def test_graph_to_kripke_two_nodes():
    m = graph_to_kripke(2, [(1, 2)])
    assert len(m.props.distinguished) == bit_length(2) == 2
    assert m.identifier(0) != m.identifier(1)
    validate_model(m, 1)


def test_graph_to_kripke_path():
    m = graph_to_kripke(5, [(1, 2), (2, 3), (3, 4), (4, 5)])
    assert len(m.props.distinguished) == 3
    assert len({m.identifier(w) for w in m.nodes()}) == 5
    validate_model(m, 2)


def test_graph_to_kripke_rejects_self_loop():
    with pytest.raises(NotSimpleGraph):
        graph_to_kripke(2, [(1, 1)])


def test_model_json_roundtrip():
    m = make_model(3, [(0, 1), (1, 2)], {"p1": {1}, "p2": {2}, "q": {0, 2}},
                   ordinary=("q",), distinguished=("p1", "p2"))
    again = model_from_json(model_to_json(m))
    assert again.n == m.n and again.edges == m.edges
    assert again.props == m.props
    for w in m.nodes():
        assert again.local_input(w) == m.local_input(w)


def test_graph_to_kripke_always_validates():
    from hypothesis import given, settings, strategies as st
    from msckit.harness import random_simple_graph

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=1, max_value=20), st.integers(min_value=0, max_value=9999))
    def inner(n, seed):
        edges = random_simple_graph(n, 3, seed) if n > 1 else []
        m = graph_to_kripke(n, edges)
        degree = {v: 0 for v in range(1, n + 1)}
        for (u, v) in edges:
            degree[u] += 1
            degree[v] += 1
        validate_model(m, max(degree.values(), default=0))
        for w in m.nodes():
            order = m.neighbor_order(w)
            assert sorted(order) == sorted(m.succ(w))
            ids = [m.identifier(v) for v in order]
            assert ids == sorted(ids)
            assert len(m.local_input_bits(w)) == len(m.props.all)

    inner()

import pytest
from hypothesis import given, settings, strategies as st

from msckit.eval import (
    TooLarge, UnsuitableModel, expand_iteration_formula, model_check, run,
    trace_to_json, trace_to_text,
)
from msckit.harness import random_kripke, random_program
from msckit.model import KripkeModel, PropositionSet
from msckit.syntax import And, Diamond, Prop, TOP, parse_program, print_schema


def two_cycle(p1_at=1):
    return KripkeModel(
        n=2, edges=frozenset({(0, 1), (1, 0)}),
        valuation={"p1": frozenset({p1_at})},
        props=PropositionSet(distinguished=("p1",)),
    )


def test_identity_program_fixed():
    p = parse_program("msc { X(0) := p1; X := X; }")
    t = run(p, two_cycle(), 4)
    for r in range(5):
        assert t.configs[r] == t.configs[0]


def test_diamond_propagation_on_cycle():
    p = parse_program("msc { X(0) := p1; X := <> X; }")
    t = run(p, two_cycle(), 3)
    assert t.configs[0] == [(False,), (True,)]
    assert t.configs[1] == [(True,), (False,)]
    assert t.configs[2] == [(False,), (True,)]


def test_accept_at_round_zero():
    p = parse_program("msc { X(0) := T; X := X; attention X; print X; }")
    t = run(p, two_cycle(), 3)
    for w in (0, 1):
        assert t.acceptance_round(w) == 0
        assert t.output(w) == "1"


def test_acceptance_is_first_attention_round():
    p = parse_program("msc { X(0) := F; X := T; attention X; print X; }")
    t = run(p, two_cycle(), 3)
    assert t.acceptance_round(0) == 1


def test_indexed_diamond_missing_neighbor_false():
    props = PropositionSet(distinguished=("p1",))
    m = KripkeModel(n=2, edges=frozenset({(0, 1)}),
                    valuation={"p1": frozenset({1})}, props=props)
    p = parse_program("mpmsc { X(0) := F; Y(0) := F; X := <1> T; Y := <2> T; }")
    t = run(p, m, 2)
    assert t.configs[1][0] == (True, False)   # node 0 has one neighbour
    assert t.configs[1][1] == (False, False)  # node 1 has none


def test_conditional_first_hot_condition_wins():
    p = parse_program("""cmsc {
      A(0) := T; B(0) := T; X(0) := F;
      A := A; B := B;
      X :=[A, B] p1; !p1; F;
    }""")
    t = run(p, two_cycle(), 1)
    # both conditions true: the first one is hot, so X copies p1
    assert t.configs[1][0][2] is False
    assert t.configs[1][1][2] is True


def test_diamond_in_condition_never_broadcasts():
    p = parse_program("""cmsc {
      X(0) := F;
      X :=[<> T] p1; X;
    }""")
    t = run(p, two_cycle(), 4)
    assert t.comm_rounds == set()
    q = parse_program("cmsc { X(0) := F; X :=[p1] <> T; X; }")
    tq = run(q, two_cycle(), 4)
    assert tq.comm_rounds == {1, 2, 3, 4}  # node 1's hot consequence has a diamond


def test_unsuitable_model():
    p = parse_program("msc { X(0) := q9; X := X; }")
    with pytest.raises(UnsuitableModel):
        run(p, two_cycle(), 1)


def test_expand_plain_examples():
    p = parse_program("msc { Y(0) := p1; Y := <> Y; }")
    assert expand_iteration_formula(p, "Y", 0) == Prop("p1")
    assert expand_iteration_formula(p, "Y", 1) == Diamond(Prop("p1"))
    assert expand_iteration_formula(p, "Y", 2) == Diamond(Diamond(Prop("p1")))


def test_expand_conditional_shape():
    p = parse_program("cmsc { C(0) := p1; X(0) := F; C := C; X :=[C] T; F; }")
    f = expand_iteration_formula(p, "X", 1)
    # (phi^1 and psi^1) or (not phi^1 and chi^1) with phi^1 = p1
    assert print_schema(f) == "!(!(T & p1 & T) & !(!p1 & F))"


def test_expand_budget():
    p = parse_program("msc { X(0) := p1; X := X & X & X & X; }")
    with pytest.raises(TooLarge):
        expand_iteration_formula(p, "X", 30, budget=20)


def test_expand_rejects_indexed():
    p = parse_program("mpmsc { X(0) := p1; X := <1> X; }")
    with pytest.raises(Exception):
        expand_iteration_formula(p, "X", 1)


def test_model_check_examples():
    m = two_cycle()
    assert model_check(TOP, m, 0)
    lonely = KripkeModel(n=1, edges=frozenset(), valuation={},
                         props=PropositionSet(distinguished=("p1",)))
    assert not model_check(Diamond(TOP), lonely, 0)
    # three-node path: 0 -> 1 -> 2, p1 at 1, p2 at 2
    props = PropositionSet(distinguished=("p1", "p2"))
    path = KripkeModel(n=3, edges=frozenset({(0, 1), (1, 2)}),
                       valuation={"p1": frozenset({1}), "p2": frozenset({2})},
                       props=props)
    f = Diamond(And(Prop("p1"), Diamond(Prop("p2"))))
    assert model_check(f, path, 0)
    assert not model_check(f, path, 1)


def test_trace_dump_formats():
    p = parse_program("msc { X(0) := p1; X := <> X; attention X; print X; }")
    t = run(p, two_cycle(), 2)
    text = trace_to_text(t)
    assert "round 0: 0 0 [A:0] [P:0] bcast:0" in text
    data = trace_to_json(t)
    assert data["rounds"] == 3
    assert data["outputs"]["1"] == "1"


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=5_000))
def test_run_deterministic(seed):
    p = random_program("cmsc", seed, heads=2, pi0=1, id_bits=2)
    m = random_kripke(3, 1, 2, seed)
    t1 = run(p, m, 5)
    t2 = run(p, m, 5)
    assert t1.configs == t2.configs and t1.comm_rounds == t2.comm_rounds


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=5_000))
def test_acceptance_unique_and_minimal(seed):
    p = random_program("msc", seed, heads=2, pi0=1, id_bits=2)
    m = random_kripke(3, 1, 2, seed + 1)
    t = run(p, m, 6)
    for w in m.nodes():
        r = t.acceptance_round(w)
        if r is None:
            assert all(
                not any(t.configs[i][w][j] for j in t.attention_positions)
                for i in range(t.rounds)
            )
        else:
            assert any(t.configs[r][w][j] for j in t.attention_positions)
            assert all(
                not any(t.configs[i][w][j] for j in t.attention_positions)
                for i in range(r)
            )

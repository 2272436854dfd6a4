import itertools

import pytest

from msckit.circuit import (
    AND, ArityMismatch, Circuit, CircuitBuilder, CircuitError, Gate, MPC,
    NOT, OR, UnexpectedDiamond, circuit_to_netlist, formula_to_circuit,
    mpc_to_netlist, netlist_to_circuit, run_mpc,
)
from msckit.eval import UnsuitableModel, model_check
from msckit.harness import random_kripke, random_mpc
from msckit.model import KripkeModel, PropositionSet
from msckit.syntax import And, Diamond, Not, Prop, TOP, parse_program


def test_constant_gates():
    b = CircuitBuilder()
    c = b.build([], [b.add(AND)])
    assert c.eval_string("") == "1"
    b = CircuitBuilder()
    c = b.build([], [b.add(OR)])
    assert c.eval_string("") == "0"


def test_not_gate():
    b = CircuitBuilder()
    i = b.input()
    c = b.build([i], [b.add(NOT, (i,))])
    assert c.eval_string("0") == "1" and c.eval_string("1") == "0"


def test_not_needs_single_fanin():
    with pytest.raises(CircuitError):
        Gate(NOT, (0, 1))


def test_cycle_rejected():
    with pytest.raises(CircuitError):
        Circuit((Gate(AND, (1,)), Gate(AND, (0,))), (), (0,))


def test_arity_mismatch():
    b = CircuitBuilder()
    i = b.input()
    c = b.build([i], [b.add(NOT, (i,))])
    with pytest.raises(ArityMismatch):
        c.eval("00")


def test_depth_and_heights():
    b = CircuitBuilder()
    i = b.input()
    c = b.build([i], [i])
    assert c.depth == 0 and c.heights == (0,)
    b = CircuitBuilder()
    i = b.input()
    n = b.add(NOT, (i,))
    a = b.add(AND, (n,))
    c = b.build([i], [a])
    assert c.depth == 2 and c.heights == (0, 1, 2)


def test_combine_depth_formula():
    from msckit.compile import combine_two_circuits
    b = CircuitBuilder()
    i = b.input()
    c0 = b.build([i], [b.add(NOT, (i,))])      # depth 1
    b = CircuitBuilder()
    j = b.input()
    n = b.add(NOT, (j,))
    c1 = b.build([j], [b.add(NOT, (n,))])      # depth 2
    comb = combine_two_circuits(c0, c1)
    assert comb.depth == max(c0.depth, c1.depth) + 2


def test_formula_to_circuit_top():
    c, labels = formula_to_circuit(TOP)
    assert labels == () and c.eval_string("") == "1"


def test_formula_to_circuit_shared_inputs():
    c, labels = formula_to_circuit(And(Prop("p"), Not(Prop("p"))))
    assert labels == ("p",)
    assert c.size == 3
    assert c.eval_string("1") == "0" and c.eval_string("0") == "0"


def test_formula_to_circuit_tree_shape():
    f = And(And(Prop("p"), Prop("q")), And(Prop("p"), Prop("q")))
    c, labels = formula_to_circuit(f)
    assert c.size == 5  # 2 shared inputs + 3 AND nodes (no internal sharing)


def test_formula_to_circuit_rejects_diamond():
    with pytest.raises(UnexpectedDiamond):
        formula_to_circuit(Diamond(Prop("p")))


def test_formula_circuit_agrees_with_model_check():
    p = parse_program("msc { X(0) := (p1 & !p2) | (p2 <-> p1); X := X; }")
    f = p.terminals["X"]
    c, labels = formula_to_circuit(f)
    props = PropositionSet(distinguished=("p1", "p2"))
    for bits in itertools.product([False, True], repeat=2):
        valuation = {name: frozenset({0} if bit else set())
                     for name, bit in zip(("p1", "p2"), bits)}
        m = KripkeModel(n=1, edges=frozenset(), valuation=valuation, props=props)
        inputs = [m.holds(name, 0) for name in labels]
        assert c.eval(inputs)[0] == model_check(f, m, 0)


def test_mpc_arity_checked():
    b = CircuitBuilder()
    ins = [b.input() for _ in range(3)]
    c = b.build(ins, [b.add(AND, (ins[0],))])
    with pytest.raises(ArityMismatch):
        MPC(circuit=c, props=PropositionSet(distinguished=("p1",)), delta=1,
            state_len=2, attention_bits=frozenset(), print_bits=frozenset())


def test_run_mpc_constant_accepts_everywhere():
    b = CircuitBuilder()
    g = b.add(AND)
    ins = [b.input() for _ in range(1 + 1 * 2)]
    mpc = MPC(circuit=b.build(ins, [g]),
              props=PropositionSet(distinguished=("p1",)), delta=1,
              state_len=1, attention_bits=frozenset({1}), print_bits=frozenset({1}))
    m = KripkeModel(n=2, edges=frozenset({(0, 1), (1, 0)}),
                    valuation={"p1": frozenset({1})},
                    props=PropositionSet(distinguished=("p1",)))
    t = run_mpc(mpc, m, 3)
    assert all(t.acceptance_round(w) == 0 for w in (0, 1))
    assert t.comm_rounds == {1, 2, 3}


def test_run_mpc_identity_on_first_neighbor_propagates():
    # k = 1, output = the first neighbour's state bit; |Pi| = 1, delta = 1.
    b = CircuitBuilder()
    ins = [b.input() for _ in range(1 + 1 * 2)]
    out = b.add(AND, (ins[2],))
    mpc = MPC(circuit=b.build(ins, [out]),
              props=PropositionSet(distinguished=("p1",)), delta=1,
              state_len=1, attention_bits=frozenset({1}), print_bits=frozenset({1}))
    m = KripkeModel(n=2, edges=frozenset({(0, 1), (1, 0)}),
                    valuation={"p1": frozenset({1})},
                    props=PropositionSet(distinguished=("p1",)))
    t = run_mpc(mpc, m, 3)
    # round 0 state is 0 everywhere (zero-padded input), so it stays 0
    assert all(t.state_string(r, w) == "0" for r in range(4) for w in (0, 1))


def test_run_mpc_suitability():
    mpc = random_mpc(0, k=1, delta=1, pi0=0, id_bits=2, depth=1)
    bad = random_kripke(3, 1, 1, 0, id_bits=2)  # has an ordinary symbol
    with pytest.raises(UnsuitableModel):
        run_mpc(mpc, bad, 1)


def test_netlist_roundtrip_circuit_and_mpc():
    mpc = random_mpc(3, k=2, delta=1, pi0=1, id_bits=2, depth=2)
    text = mpc_to_netlist(mpc)
    again = netlist_to_circuit(text)
    assert isinstance(again, MPC)
    assert mpc_to_netlist(again) == text
    plain = circuit_to_netlist(mpc.circuit)
    again2 = netlist_to_circuit(plain)
    assert circuit_to_netlist(again2) == plain


def test_netlist_depth_zero_input_is_output():
    b = CircuitBuilder()
    i = b.input()
    c = b.build([i], [i])
    text = circuit_to_netlist(c)
    c2 = netlist_to_circuit(text)
    assert c2.output_order == c2.input_order


def test_eval_matches_model_check_exhaustive_small():
    mpc = random_mpc(5, k=2, delta=1, pi0=1, id_bits=2, depth=3)
    c = mpc.circuit
    k = len(c.input_order)
    if k <= 10:
        for bits in itertools.product([False, True], repeat=k):
            c.eval(bits)  # smoke: total function, no exceptions


def test_split_fanin():
    import itertools
    from msckit.circuit import split_fanin
    b = CircuitBuilder()
    ins = [b.input() for _ in range(5)]
    wide_and = b.add(AND, tuple(ins))
    wide_or = b.add(OR, tuple(ins) + (wide_and,))
    c = b.build(ins, [wide_or])
    assert c.max_fanin() == 6
    narrow = split_fanin(c, 2)
    assert narrow.max_fanin() <= 2
    for bits in itertools.product([False, True], repeat=5):
        assert narrow.eval(bits) == c.eval(bits)
    assert narrow.depth <= c.depth + 6


def test_run_mpc_state_propagates_between_neighbors():
    # k = 1; next state = own proposition OR first neighbour's state bit
    b = CircuitBuilder()
    ins = [b.input() for _ in range(1 + 1 * 2)]
    out = b.add(OR, (ins[0], ins[2]))
    mpc = MPC(circuit=b.build(ins, [out]),
              props=PropositionSet(distinguished=("p1",)), delta=1,
              state_len=1, attention_bits=frozenset({1}), print_bits=frozenset({1}))
    m = KripkeModel(n=2, edges=frozenset({(0, 1), (1, 0)}),
                    valuation={"p1": frozenset({1})},
                    props=PropositionSet(distinguished=("p1",)))
    t = run_mpc(mpc, m, 2)
    assert [t.state_string(0, w) for w in (0, 1)] == ["0", "1"]
    assert [t.state_string(1, w) for w in (0, 1)] == ["1", "1"]
    assert [t.state_string(2, w) for w in (0, 1)] == ["1", "1"]


def test_formula_circuit_agreement_exhaustive_six_inputs():
    from msckit.syntax import parse_program
    p = parse_program(
        "msc { X(0) := ((a & b) | !(c <-> d)) -> (e | (f & a) | !b); X := X; }")
    f = p.terminals["X"]
    c, labels = formula_to_circuit(f)
    assert len(labels) == 6
    props = PropositionSet(ordinary=tuple(sorted(labels)), distinguished=())
    for bits in itertools.product([False, True], repeat=6):
        valuation = {name: frozenset({0} if bit else set())
                     for name, bit in zip(labels, bits)}
        m = KripkeModel(n=1, edges=frozenset(), valuation=valuation, props=props)
        assert c.eval(bits)[0] == model_check(f, m, 0)

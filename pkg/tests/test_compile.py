import itertools

from msckit import compile as comp
from msckit.circuit import AND, CircuitBuilder, NOT, run_mpc
from msckit.eval import run
from msckit.harness import (
    EquivalenceSpec, check_equivalence, random_kripke, random_mpc, random_program,
)
from msckit.model import KripkeModel, PropositionSet
from msckit.syntax import (
    And, Diamond, Not, Prop, Var, bot, metrics, parse_program, print_schema,
)


def lonely_model():
    return KripkeModel(n=1, edges=frozenset(), valuation={},
                       props=PropositionSet(distinguished=("p1",)))


# -- circuit simulation -----------------------------------------------------

def test_simulation_not_gate_clauses():
    b = CircuitBuilder()
    i = b.input()
    c = b.build([i], [b.add(NOT, (i,))])
    sim = comp.simulate_circuit_as_program(c)
    head = sim.output_heads[0]
    assert sim.program.terminals[head] == bot()
    assert sim.program.iterations[head].backup == Not(Var(sim.input_heads[0]))


def test_simulation_depth_zero():
    b = CircuitBuilder()
    i = b.input()
    c = b.build([i], [i])
    sim = comp.simulate_circuit_as_program(c)
    assert sim.depth == 0
    assert sim.input_heads == sim.output_heads
    assert sim.program.iterations[sim.input_heads[0]].backup == bot()


def test_simulation_three_gate_exhaustive():
    b = CircuitBuilder()
    i = b.input()
    n = b.add(NOT, (i,))
    c = b.build([i], [n])
    sim = comp.simulate_circuit_as_program(c)
    for bit in (False, True):
        t = run(sim.patched([bit]), lonely_model(), sim.depth)
        got = t.configs[sim.depth][0][sim.program.head_index(sim.output_heads[0])]
        assert got == (not bit)


def test_simulation_pads_outputs_to_uniform_depth():
    b = CircuitBuilder()
    i1, i2 = b.input(), b.input()
    n = b.add(NOT, (i1,))
    deep = b.add(AND, (n, i2))
    shallow = b.add(AND, (i2,))
    c = b.build([i1, i2], [deep, shallow])
    sim = comp.simulate_circuit_as_program(c)
    for bits in itertools.product([False, True], repeat=2):
        t = run(sim.patched(bits), lonely_model(), sim.depth)
        got = tuple(
            t.configs[sim.depth][0][sim.program.head_index(h)]
            for h in sim.output_heads
        )
        assert got == c.eval(bits)


# -- mpc <-> mpmsc -----------------------------------------------------------

def test_mpc_to_mpmsc_clock_shape():
    mpc = random_mpc(1, k=2, delta=1, pi0=1, id_bits=2, depth=2)
    prog, report = comp.mpc_to_mpmsc(mpc)
    d = comp._pad_outputs(mpc.circuit).depth
    m = random_kripke(3, 1, 1, 5, id_bits=2)
    t = run(prog, m, 2 * (d + 1) + 1)
    t_heads = [f"T{i}" for i in range(d + 1)]
    for r in range(2 * (d + 1)):
        true_ts = [h for h in t_heads if t.configs[r][0][prog.head_index(h)]]
        assert len(true_ts) == 1
        expected = "T0" if r % (d + 1) == d else f"T{r % (d + 1) + 1}"
        assert true_ts == [expected]
    assert report.round_mapping["period"] == d + 1
    assert sorted(t.comm_rounds) == [d + 1, 2 * (d + 1)]


def test_mpc_to_mpmsc_is_valid_mpmsc():
    mpc = random_mpc(2, k=2, delta=2, pi0=0, id_bits=2, depth=3)
    prog, _ = comp.mpc_to_mpmsc(mpc)
    assert prog.variant == "mpmsc"
    m = metrics(prog)
    assert m.mdt == 0 and m.mdi <= 1


# -- conditional elimination -------------------------------------------------

def test_fold_single_condition_shape():
    p = parse_program("cmsc { C(0) := p1; X(0) := F; C := C; X :=[C] p1; X; }")
    q, _ = comp.cmsc_to_msc(p)
    body = q.iterations["X"].backup
    assert print_schema(body) == "!(!(C & p1) & !(!C & X))"
    assert q.variant == "msc"


def test_fold_keeps_plain_clauses():
    p = parse_program("cmsc { X(0) := p1; X := <> X; }")
    q, _ = comp.cmsc_to_msc(p)
    assert q.iterations["X"] == p.iterations["X"]


def test_fold_preserves_depths():
    for seed in range(5):
        p = random_program("cmsc", seed, heads=3, pi0=1, id_bits=2, max_depth=2)
        q, _ = comp.cmsc_to_msc(p)
        assert metrics(q).mdt == metrics(p).mdt
        assert metrics(q).mdi == metrics(p).mdi


# -- omnipresence ------------------------------------------------------------

def test_make_omnipresent_no_change_when_complete():
    text = """mpmsc {
      X(0) := p1;
      X := X & !<1> (X | !X) & !<2> (X | !X) & (p1 | !p1) & !<1> p1 & !<2> p1;
    }"""
    p = parse_program(text)
    q, _ = comp.make_omnipresent(p, 2, ("p1",))
    assert q == p


def test_make_omnipresent_adds_missing_proposition():
    p = parse_program("mpmsc { X(0) := p1; X := <1> X; }")
    q, _ = comp.make_omnipresent(p, 1, ("p1", "q1"))
    assert "q1" in q.proposition_names()
    assert metrics(q).size > metrics(p).size


def test_make_omnipresent_inert_host_when_all_conditional():
    p = parse_program("mpmsc { X(0) := p1; X :=[X] p1; X; }")
    q, _ = comp.make_omnipresent(p, 1, ("p1",))
    assert len(q.head_order) == 2  # fresh inert host appended
    m = random_kripke(3, 0, 1, 2, id_bits=2)
    r = check_equivalence(p, q, EquivalenceSpec("strong", 6), [m])
    assert r.passed


# -- clocks ------------------------------------------------------------------

def test_clock_lengths_and_offsets():
    base = comp.clock_program(3, 0)
    fwd = comp.clock_program(3, 1)
    dbl = comp.clock_program(3, 2)
    m = lonely_model()
    tb = run(base, m, 30)
    tf = run(fwd, m, 28)
    td = run(dbl, m, 28)
    for t in range(25):
        assert tf.configs[t][0] == tb.configs[t + 1][0]
        assert td.configs[t][0] == tb.configs[t + 2][0]


def test_clock_ell_one():
    p = comp.clock_program(1, 0)
    t = run(p, lonely_model(), 10)
    frag = comp.build_clock(1, 0)
    values = [int(t.configs[r][0][p.head_index(frag.minute[0])]) for r in range(11)]
    # period 2 in steady state: 0 at round 0, then alternating blocks
    assert values[0] == 0
    changes = sum(1 for a, b in zip(values, values[1:]) if a != b)
    assert changes >= 4
    assert {0, 1} == set(values)


# -- indexed-diamond elimination ----------------------------------------------

def test_eliminate_single_rule_example():
    p = parse_program("mpmsc { X(0) := F; X := <1> p1; attention X; print X; }")
    q, rep = comp.eliminate_indexed_diamonds(p, ("p1", "p2"))
    props = PropositionSet(distinguished=("p1", "p2"))
    m = KripkeModel(n=2, edges=frozenset({(0, 1)}),
                    valuation={"p1": frozenset({1})}, props=props)
    r = check_equivalence(p, q, EquivalenceSpec("strong", 4, rep.round_mapping),
                          [m], cycle_hint=14)
    assert r.passed, r.failures
    assert q.variant == "cmsc"


def test_eliminate_no_diamond_program():
    p = parse_program("mpmsc { X(0) := p1; X := !X; attention X; print X; }")
    q, rep = comp.eliminate_indexed_diamonds(p, ("p1", "p2"))
    m = random_kripke(3, 0, 2, 11, id_bits=2)
    r = check_equivalence(p, q, EquivalenceSpec("strong", 6, rep.round_mapping),
                          [m], cycle_hint=14)
    assert r.passed, r.failures


def test_eliminate_maximal_id_neighbor():
    # neighbour with the all-ones ID must not leak into higher indices
    props = PropositionSet(distinguished=("p1", "p2"))
    m = KripkeModel(n=2, edges=frozenset({(0, 1)}),
                    valuation={"p1": frozenset({0, 1}), "p2": frozenset({1})},
                    props=props)  # IDs 01 and 11
    p = parse_program("mpmsc { X(0) := F; X := <2> T; attention X; print X; }")
    q, rep = comp.eliminate_indexed_diamonds(p, ("p1", "p2"))
    r = check_equivalence(p, q, EquivalenceSpec("strong", 4, rep.round_mapping),
                          [m], cycle_hint=14)
    assert r.passed, r.failures


# -- normal forms --------------------------------------------------------------

def test_terminal_depth_zero_identity_when_flat():
    p = parse_program("msc { X(0) := p1; X := <> X; }")
    q, rep = comp.terminal_depth_zero(p)
    assert q == p and rep.round_mapping["shift"] == 0


def test_terminal_depth_zero_shift():
    p = parse_program("msc { X(0) := <> p1; X := X; attention X; print X; }")
    q, rep = comp.terminal_depth_zero(p)
    assert metrics(q).mdt == 0
    m = random_kripke(4, 0, 2, 3, id_bits=2)
    ta, tb = run(p, m, 5), run(q, m, 6)
    for n in range(6):
        for w in m.nodes():
            assert ta.appointed_string(n, w) == tb.appointed_string(n + 1, w)
    for w in m.nodes():
        ra, rb = ta.acceptance_round(w), tb.acceptance_round(w)
        assert (ra is None and rb is None) or rb == ra + 1


def test_to_msc1_worked_example():
    p = parse_program("msc { X(0) := p1; X := <> <> (<> <> X & <> X); }")
    cond, rep = comp.to_msc1_conditional(p)
    clock = [h for h in cond.head_order if h.startswith("T")]
    assert len(clock) == 4
    # four fresh heads: the copy of X plus one per diamond subschema of
    # depth 1..3, with exactly the worked-example clauses
    copy = cond.head_order[0]
    assert cond.terminals[copy] == Prop("p1")
    by_body = {cond.iterations[h].consequences[0]: h
               for h in cond.head_order if h not in clock and h != copy}
    h1 = by_body[Diamond(Var(copy))]                     # X_{<>X}
    h2 = by_body[Diamond(Var(h1))]                       # X_{<><>X}
    h3 = by_body[Diamond(And(Var(h2), Var(h1)))]         # X_{<>(<><>X & <>X)}
    assert len(by_body) == 3
    assert cond.iterations[copy].conditions == (Var(clock[3]),)
    assert cond.iterations[copy].consequences == (Diamond(Var(h3)),)
    assert cond.iterations[copy].backup == Var(copy)
    for h, tick in ((h1, clock[0]), (h2, clock[1]), (h3, clock[2])):
        assert cond.iterations[h].conditions == (Var(tick),)
        assert cond.iterations[h].backup == Var(h)
        assert cond.terminals[h] == bot()
    assert rep.round_mapping == {"kind": "dilation", "factor": 4, "shift": 0}
    q, _ = comp.to_msc1(p)
    mm = metrics(q)
    assert mm.mdt == 0 and mm.mdi == 1


def test_msc_to_mpc_diamond_expansion_semantics():
    p = parse_program("msc { X(0) := <> T; X := X; attention X; print X; }")
    props = PropositionSet(distinguished=("p1", "p2"))
    mpc, rep = comp.msc_to_mpc(p, 2, props)
    m = KripkeModel(n=2, edges=frozenset({(0, 1)}),
                    valuation={"p1": frozenset({1})}, props=props)
    t = run_mpc(mpc, m, 10)
    assert t.acceptance_round(0) is not None
    assert t.acceptance_round(1) is None


def test_mpc_to_msc_always_accepting():
    b = CircuitBuilder()
    g = b.add(AND)
    ins = [b.input() for _ in range(2 + 1 * 2)]
    from msckit.circuit import MPC
    mpc = MPC(circuit=b.build(ins, [g]),
              props=PropositionSet(distinguished=("p1", "p2")), delta=1,
              state_len=1, attention_bits=frozenset({1}), print_bits=frozenset({1}))
    prog, rep = comp.mpc_to_msc(mpc)
    m = random_kripke(3, 0, 1, 9, id_bits=2)
    t = run(prog, m, 60)
    assert all(t.acceptance_round(w) is not None for w in m.nodes())
    assert all(t.output(w) == "1" for w in m.nodes())


def test_translation_report_fields():
    p = random_program("cmsc", 3, heads=2, pi0=1, id_bits=2)
    q, rep = comp.cmsc_to_msc(p)
    data = rep.to_json()
    assert data["translation"] == "cmsc_to_msc"
    assert data["source"]["size"] == metrics(p).size
    assert data["target"]["size"] == metrics(q).size
    assert "translation: cmsc_to_msc" in rep.to_text()

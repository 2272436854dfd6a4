"""Translations between programs and circuits.

Each operation follows the corresponding construction step by step; composed
translations are implemented as compositions so every stage stays testable
on its own.  Reports record source/target sizes and the round mapping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import (
    AND, INPUT, NOT, OR, Circuit, CircuitBuilder, Gate, MPC, OutputArityMismatch,
)
from .model import PropositionSet
from .syntax import (
    And, Diamond, DiamondI, IterationClause, Metrics, Not, Program, Prop,
    Schema, TOP, Top, Var, big_and, big_or, bot, fresh_name, iff, make_program,
    metrics, modal_depth, name_for_schema, or_, plain, prop_names, rewrite,
    substitute_vars, var_names, walk,
)


class CompileError(Exception):
    pass


class DiamondIndexExceedsDelta(CompileError):
    pass


class NoPlainClause(CompileError):
    pass


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def metrics_dict(m: Metrics) -> dict:
    return {
        "size": m.size, "md": m.md, "mdt": m.mdt, "mdi": m.mdi,
        "max_diamond_index": m.max_diamond_index, "head_count": m.head_count,
    }


def program_metrics(p: Program) -> dict:
    return metrics_dict(metrics(p))


def circuit_metrics(c: Circuit) -> dict:
    return {"gates": c.size, "depth": c.depth, "max_fanin": c.max_fanin(),
            "inputs": len(c.input_order), "outputs": len(c.output_order)}


@dataclass
class TranslationReport:
    name: str
    source_metrics: dict
    target_metrics: dict
    time_dilation: str
    round_mapping: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "translation": self.name,
            "source": self.source_metrics,
            "target": self.target_metrics,
            "time_dilation": self.time_dilation,
            "round_mapping": self.round_mapping,
        }

    def to_text(self) -> str:
        lines = [f"translation: {self.name}"]
        lines.append("  source: " + ", ".join(f"{k}={v}" for k, v in self.source_metrics.items()))
        lines.append("  target: " + ", ".join(f"{k}={v}" for k, v in self.target_metrics.items()))
        lines.append(f"  time dilation: {self.time_dilation}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Circuit simulation by a diamond-free program
# ---------------------------------------------------------------------------

@dataclass
class _PaddedCircuit:
    """Gate list with every output raised to uniform height ``depth``."""

    gates: list[Gate]
    input_order: tuple[int, ...]
    outputs: list[int]
    heights: list[int]
    depth: int


def _pad_outputs(c: Circuit, min_depth: int = 1) -> _PaddedCircuit:
    gates = list(c.gates)
    heights = list(c.heights)
    depth = max(c.depth, min_depth)
    outputs = []
    for out in c.output_order:
        gate = out
        while heights[gate] < depth:
            gates.append(Gate(AND, (gate,)))
            heights.append(heights[gate] + 1)
            gate = len(gates) - 1
        outputs.append(gate)
    return _PaddedCircuit(gates, c.input_order, outputs, heights, depth)


def _gate_body(gate: Gate, names: list[str]) -> Schema:
    operands = [Var(names[s]) for s in gate.fanin]
    if gate.label == AND:
        return big_and(operands)
    if gate.label == OR:
        return big_or(operands)
    if gate.label == NOT:
        return Not(operands[0])
    raise CompileError(f"unexpected gate label {gate.label}")


def _const_terminal(gate: Gate) -> Schema:
    """Terminal value of a source gate head.

    Zero-fan-in AND/OR gates are constants with no path from any input gate;
    giving their heads the constant as terminal keeps every gate head correct
    from the round equal to its height on.
    """
    return TOP if gate.label == AND else bot()


@dataclass
class SimulationProgram:
    """A diamond-free program simulating a circuit w.r.t. I/O heads.

    Patching ``input_heads`` terminals with an input tuple and reading
    ``output_heads`` in round ``depth`` computes the circuit's function.
    """

    program: Program
    input_heads: tuple[str, ...]
    output_heads: tuple[str, ...]
    depth: int
    report: TranslationReport

    def patched(self, bits) -> Program:
        terminals = dict(self.program.terminals)
        for head, bit in zip(self.input_heads, bits):
            terminals[head] = TOP if bit else bot()
        return Program(
            variant=self.program.variant,
            head_order=self.program.head_order,
            terminals=terminals,
            iterations=self.program.iterations,
            attention=self.program.attention,
            prints=self.program.prints,
        )


def simulate_circuit_as_program(c: Circuit, variant: str = "msc") -> SimulationProgram:
    """Diamond-free, proposition-free program simulating the circuit."""
    if c.depth == 0:
        names = [f"I{pos + 1}" for pos in range(len(c.input_order))]
        terminals = [(n, bot()) for n in names]
        clauses = [plain(n, bot()) for n in names]
        program = make_program(variant, terminals, clauses)
        out_heads = tuple(
            names[c.input_order.index(g)] for g in c.output_order
        )
        report = TranslationReport(
            "simulate_circuit_as_program", circuit_metrics(c),
            program_metrics(program), "1 evaluation = 0 rounds (depth 0)",
        )
        return SimulationProgram(program, tuple(names), out_heads, 0, report)

    padded = _pad_outputs(c)
    names: list[str] = [""] * len(padded.gates)
    input_pos = {g: i for i, g in enumerate(padded.input_order)}
    output_pos = {g: i for i, g in enumerate(padded.outputs)}
    for g, gate in enumerate(padded.gates):
        if g in output_pos:
            names[g] = f"O{output_pos[g] + 1}"
        elif gate.label == INPUT:
            names[g] = f"I{input_pos[g] + 1}"
        else:
            names[g] = f"G{g}"

    terminals = []
    clauses = []
    for g, gate in enumerate(padded.gates):
        if gate.label == INPUT:
            terminals.append((names[g], bot()))
            clauses.append(plain(names[g], Var(names[g])))
        elif not gate.fanin:
            terminals.append((names[g], _const_terminal(gate)))
            clauses.append(plain(names[g], _gate_body(gate, names)))
        else:
            terminals.append((names[g], bot()))
            clauses.append(plain(names[g], _gate_body(gate, names)))
    program = make_program(variant, terminals, clauses)
    report = TranslationReport(
        "simulate_circuit_as_program", circuit_metrics(c),
        program_metrics(program), f"1 evaluation = {padded.depth} rounds",
    )
    return SimulationProgram(
        program,
        tuple(names[g] for g in padded.input_order),
        tuple(names[g] for g in padded.outputs),
        padded.depth,
        report,
    )


# ---------------------------------------------------------------------------
# MPC -> MPMSC
# ---------------------------------------------------------------------------

def mpc_to_mpmsc(mpc: MPC) -> tuple[Program, TranslationReport]:
    """Communication-equivalent MPMSC program executing the circuit in
    periods of depth+1 rounds, with a clock gating each gate height."""
    padded = _pad_outputs(mpc.circuit)
    d = padded.depth
    k = mpc.state_len
    pi = mpc.props.all

    names: list[str] = [""] * len(padded.gates)
    output_pos = {g: i for i, g in enumerate(padded.outputs)}
    # Input gate layout: propositions, then delta+1 blocks of k state bits.
    input_kind: dict[int, tuple] = {}
    for pos, g in enumerate(padded.input_order):
        if pos < len(pi):
            input_kind[g] = ("prop", pos + 1)
            names[g] = f"IP{pos + 1}"
        else:
            rel = pos - len(pi)
            j, i = divmod(rel, k)
            input_kind[g] = ("state", i + 1, j)
            names[g] = f"I{i + 1}n{j}"
    for g, gate in enumerate(padded.gates):
        if names[g]:
            continue
        names[g] = f"O{output_pos[g] + 1}" if g in output_pos else f"G{g}"

    terminals: list[tuple[str, Schema]] = []
    clauses: list[IterationClause] = []

    # Simple clock of length d+1: in round 0 only T1 is true, in round
    # i in [d-1] only T(i+1), and after d rounds T0.
    terminals.append(("T0", bot()))
    clauses.append(plain("T0", Var(f"T{d}")))
    terminals.append(("T1", TOP))
    clauses.append(plain("T1", Var("T0")))
    for i in range(1, d):
        terminals.append((f"T{i + 1}", bot()))
        clauses.append(plain(f"T{i + 1}", Var(f"T{i}")))

    for g, gate in enumerate(padded.gates):
        name = names[g]
        if gate.label == INPUT:
            kind = input_kind[g]
            if kind[0] == "prop":
                sym = Prop(pi[kind[1] - 1])
                terminals.append((name, sym))
                clauses.append(IterationClause(name, (Var("T0"),), (sym,), Var(name)))
            else:
                _, i, j = kind
                terminals.append((name, bot()))
                source = Var(f"O{i}") if j == 0 else DiamondI(j, Var(f"O{i}"))
                clauses.append(IterationClause(name, (Var("T0"),), (source,), Var(name)))
        else:
            terminals.append((name, _const_terminal(gate) if not gate.fanin else bot()))
            body = _gate_body(gate, names)
            height = padded.heights[g]
            clauses.append(IterationClause(name, (Var(f"T{height}"),), (body,), Var(name)))

    attention = {f"O{i}" for i in mpc.attention_bits}
    prints = {f"O{i}" for i in mpc.print_bits}
    outputs = [f"O{i}" for i in range(1, k + 1)]
    head_order = [h for h, _ in terminals if h not in set(outputs)] + outputs
    program = make_program("mpmsc", terminals, clauses, attention, prints, head_order)
    report = TranslationReport(
        "mpc_to_mpmsc",
        circuit_metrics(mpc.circuit),
        program_metrics(program),
        f"1 circuit round = {d + 1} program rounds",
        {"kind": "periodic", "period": d + 1,
         "description": f"circuit round n maps to program round (n+1)*{d + 1}"},
    )
    return program, report


# ---------------------------------------------------------------------------
# Conditional elimination (CMSC -> MSC, MPMSC -> MMSC)
# ---------------------------------------------------------------------------

def _fold_conditional(clause: IterationClause) -> IterationClause:
    if not clause.is_conditional:
        return clause
    theta = or_(
        And(clause.conditions[-1], clause.consequences[-1]),
        And(Not(clause.conditions[-1]), clause.backup),
    )
    for cond, cons in zip(clause.conditions[-2::-1], clause.consequences[-2::-1]):
        theta = or_(And(cond, cons), And(Not(cond), theta))
    return plain(clause.head, theta)


def cmsc_to_msc(p: Program) -> tuple[Program, TranslationReport]:
    """Replace every conditional rule by the equivalent nested if-else body."""
    target = "msc" if p.variant in ("msc", "cmsc") else "mmsc"
    program = Program(
        variant=target,
        head_order=p.head_order,
        terminals=dict(p.terminals),
        iterations={h: _fold_conditional(p.iterations[h]) for h in p.head_order},
        attention=p.attention,
        prints=p.prints,
    )
    report = TranslationReport(
        "cmsc_to_msc", program_metrics(p), program_metrics(program),
        "none (round for round)",
    )
    return program, report


# ---------------------------------------------------------------------------
# Omnipresence normalization
# ---------------------------------------------------------------------------

def _tautology(x: Schema) -> Schema:
    return or_(x, Not(x))


def _omnipresence_state(p: Program, d: int):
    """For each head/prop: does it occur plain, and under which diamond indices,
    in iteration-clause bodies (consequences and backups)."""
    plain_occ: set[str] = set()
    indexed: dict[str, set[int]] = {}

    def scan(s: Schema, under: int | None):
        if isinstance(s, (Var, Prop)):
            if under is None:
                plain_occ.add(s.name)
            else:
                indexed.setdefault(s.name, set()).add(under)
            return
        if isinstance(s, DiamondI):
            scan(s.sub, s.index)
            return
        if isinstance(s, Diamond):
            scan(s.sub, under)
            return
        if isinstance(s, Not):
            scan(s.sub, under)
            return
        if isinstance(s, And):
            scan(s.left, under)
            scan(s.right, under)
            return

    for h in p.head_order:
        for s in p.iterations[h].bodies():
            scan(s, None)

    def omnipresent(name: str) -> bool:
        return name in plain_occ and set(range(1, d + 1)) <= indexed.get(name, set())

    return omnipresent


def make_omnipresent(p: Program, d: int, props) -> tuple[Program, TranslationReport]:
    """Strongly equivalent MPMSC program where every symbol in ``props``
    appears and every head (and used proposition) is d-omnipresent."""
    if p.variant != "mpmsc":
        raise CompileError("make_omnipresent expects an mpmsc program")
    if d < metrics(p).max_diamond_index:
        raise DiamondIndexExceedsDelta("d below the maximum diamond index used")
    props = tuple(props)
    omnipresent = _omnipresence_state(p, d)
    used_props = p.proposition_names()
    missing = set(used_props) - set(props)
    if missing:
        raise CompileError(f"props must cover the program's symbols, missing {sorted(missing)}")

    terminals = dict(p.terminals)
    iterations = {h: p.iterations[h] for h in p.head_order}
    head_order = list(p.head_order)

    # Unused propositions join some terminal body as a tautology.
    term_host = head_order[0]
    for q in props:
        if q not in used_props:
            terminals[term_host] = And(terminals[term_host], _tautology(Prop(q)))

    # Symbols needing d-omnipresence: heads always, plus propositions that
    # occur in an iteration rule (weak omnipresence covers the rest).
    iter_mentions: set[str] = set()
    for h in p.head_order:
        for s in p.iterations[h].all_schemata():
            iter_mentions |= prop_names(s) | var_names(s)
    needs: list[Schema] = []
    for h in p.head_order:
        if not omnipresent(h):
            needs.append(Var(h))
    for q in props:
        if q in iter_mentions and not omnipresent(q):
            needs.append(Prop(q))

    if needs:
        host = next(
            (h for h in head_order if not iterations[h].is_conditional), None
        )
        if host is None:
            host = fresh_name("Host", set(head_order))
            head_order.append(host)
            terminals[host] = bot()
            iterations[host] = plain(host, bot())
        clause = iterations[host]
        body = clause.backup
        for x in needs:
            # <i>(x | !x) asserts that neighbour i exists, so the mentions
            # are guarded behind a falsum to keep them semantically inert.
            inert = And(bot(), _tautology(x))
            for i in range(1, d + 1):
                inert = And(inert, DiamondI(i, _tautology(x)))
            body = And(body, Not(inert))
        iterations[host] = IterationClause(
            clause.head, clause.conditions, clause.consequences, body
        )

    program = Program(
        variant="mpmsc",
        head_order=tuple(head_order),
        terminals=terminals,
        iterations=iterations,
        attention=p.attention,
        prints=p.prints,
    )
    report = TranslationReport(
        "make_omnipresent", program_metrics(p), program_metrics(program),
        "none (round for round)",
    )
    return program, report


# ---------------------------------------------------------------------------
# Two circuits into one
# ---------------------------------------------------------------------------

def combine_two_circuits(c0: Circuit, c1: Circuit) -> Circuit:
    """Mux c0/c1 behind a fresh selector input.

    Input layout is c0's inputs, the selector, then c1's inputs; the output
    is the constant bit 1 followed by the selected circuit's outputs.
    """
    if len(c0.output_order) != len(c1.output_order):
        raise OutputArityMismatch("circuits must have the same number of outputs")
    b = CircuitBuilder()
    map0 = b.copy_from(c0)
    sel = b.input()
    map1 = b.copy_from(c1)
    neg = b.add(NOT, (sel,))
    blue = b.add(OR, (sel, neg))
    outs = [blue]
    for o0, o1 in zip(c0.output_order, c1.output_order):
        a0 = b.add(AND, (map0[o0], neg))
        a1 = b.add(AND, (map1[o1], sel))
        outs.append(b.add(OR, (a0, a1)))
    inputs = [map0[g] for g in c0.input_order] + [sel] + [map1[g] for g in c1.input_order]
    return b.build(inputs, outs)


# ---------------------------------------------------------------------------
# MPMSC -> MPC
# ---------------------------------------------------------------------------

def mpmsc_to_mpc(p: Program, delta: int, props: PropositionSet) -> tuple[MPC, TranslationReport]:
    """Strongly equivalent MPC with state layout [static props][present][heads]."""
    if p.variant != "mpmsc":
        raise CompileError("mpmsc_to_mpc expects an mpmsc program")
    if metrics(p).max_diamond_index > delta:
        raise DiamondIndexExceedsDelta(
            f"program uses diamond index {metrics(p).max_diamond_index} > delta {delta}"
        )
    normal, _ = make_omnipresent(p, delta, props.all)
    gamma, _ = cmsc_to_msc(normal)  # mmsc, mdt 0, mdi <= 1

    pi = props.all
    heads = gamma.head_order
    k = len(heads)
    head_pos = {h: i for i, h in enumerate(heads)}
    static = tuple(
        q for q in pi
        if any(q in prop_names(gamma.iterations[h].backup) for h in heads)
    )
    static_pos = {q: i for i, q in enumerate(static)}

    b = CircuitBuilder()
    prop_in = [b.input() for _ in pi]
    pin = {q: g for q, g in zip(pi, prop_in)}
    blocks = []
    for _ in range(delta + 1):
        blk_static = [b.input() for _ in static]
        blk_present = b.input()
        blk_heads = [b.input() for _ in heads]
        blocks.append((blk_static, blk_present, blk_heads))

    def tree(s: Schema, leaf) -> int:
        if isinstance(s, Top):
            return b.add(AND)
        if isinstance(s, (Prop, Var)):
            return leaf(s)
        if isinstance(s, Not):
            return b.add(NOT, (tree(s.sub, leaf),))
        if isinstance(s, And):
            left = tree(s.left, leaf)
            right = tree(s.right, leaf)
            return b.add(AND, (left, right))
        raise CompileError(f"unexpected schema {s!r}")

    # C0: terminal clauses over the proposition inputs.
    def term_leaf(s: Schema) -> int:
        if isinstance(s, Var):
            raise CompileError("terminal bodies cannot mention heads")
        return pin[s.name]

    c0_outs = [tree(gamma.terminals[h], term_leaf) for h in heads]

    # C1: iteration clauses; symbols under a diamond read the neighbour
    # block, the diamond becomes an AND gated on that block's present bit.
    def iter_tree(s: Schema, j: int) -> int:
        blk_static, blk_present, blk_heads = blocks[j]
        if isinstance(s, Top):
            return b.add(AND)
        if isinstance(s, Var):
            return blk_heads[head_pos[s.name]]
        if isinstance(s, Prop):
            return blk_static[static_pos[s.name]]
        if isinstance(s, Not):
            return b.add(NOT, (iter_tree(s.sub, j),))
        if isinstance(s, And):
            left = iter_tree(s.left, j)
            right = iter_tree(s.right, j)
            return b.add(AND, (left, right))
        if isinstance(s, DiamondI):
            child = iter_tree(s.sub, s.index)
            return b.add(AND, (child, blocks[s.index][1]))
        raise CompileError(f"unexpected schema {s!r}")

    c1_outs = [iter_tree(gamma.iterations[h].backup, 0) for h in heads]

    # Mux: home present bit selects C1, round 0 (all-zero state) gets C0.
    sel = blocks[0][1]
    neg = b.add(NOT, (sel,))
    present_out = b.add(OR, (sel, neg))
    head_outs = []
    for o0, o1 in zip(c0_outs, c1_outs):
        a0 = b.add(AND, (o0, neg))
        a1 = b.add(AND, (o1, sel))
        head_outs.append(b.add(OR, (a0, a1)))
    static_outs = [b.add(AND, (pin[q],)) for q in static]

    input_order = list(prop_in)
    for blk_static, blk_present, blk_heads in blocks:
        input_order.extend(blk_static)
        input_order.append(blk_present)
        input_order.extend(blk_heads)
    circuit = b.build(input_order, static_outs + [present_out] + head_outs)

    offset = len(static) + 1
    mpc = MPC(
        circuit=circuit,
        props=props,
        delta=delta,
        state_len=offset + k,
        attention_bits=frozenset(offset + head_pos[h] + 1 for h in gamma.attention),
        print_bits=frozenset(offset + head_pos[h] + 1 for h in gamma.prints),
    )
    report = TranslationReport(
        "mpmsc_to_mpc", program_metrics(p), circuit_metrics(circuit),
        "none (round for round)",
        {"kind": "identity", "state_head_offset": offset,
         "head_order": list(heads)},
    )
    return mpc, report


# ---------------------------------------------------------------------------
# Clocks
# ---------------------------------------------------------------------------

@dataclass
class ClockFragment:
    """CMSC clauses for a minute/second-hand clock over ell-bit strings."""

    minute: tuple[str, ...]       # M1..Mell, bit 1 first (rightmost bit)
    second: tuple[str, ...]
    changing: str
    terminals: list[tuple[str, Schema]]
    clauses: list[IterationClause]

    @property
    def heads(self) -> tuple[str, ...]:
        return tuple(h for h, _ in self.terminals)


def build_clock(ell: int, offset: int = 0, suffix: str = "") -> ClockFragment:
    """The basic clock (offset 0), forward clock (1) or double forward (2).

    The minute hand starts at 0^ell and walks all ell-bit strings
    lexicographically; the second hand copies minute bits right to left up
    to the flip point.  Offset k returns a clock whose whole state runs k
    rounds ahead of the basic one (the forward clock starts at 0^(ell-1)1
    with the change flag raised; the double forward additionally starts
    with the scan one round further along).
    """
    if ell < 1:
        raise CompileError("clock needs ell >= 1")
    if offset not in (0, 1, 2):
        raise CompileError("offset must be 0, 1 or 2")
    tag = suffix or {0: "", 1: "f", 2: "ff"}[offset]
    minute = tuple(f"M{i}{tag}" for i in range(1, ell + 1))
    second = tuple(f"S{i}{tag}" for i in range(1, ell + 1))
    changing = f"Sch{tag}"
    m = lambda i: Var(minute[i - 1])
    s = lambda i: Var(second[i - 1])
    ch = Var(changing)

    terminals: list[tuple[str, Schema]] = []
    clauses: list[IterationClause] = []
    for i in range(1, ell + 1):
        start = offset >= 1 and i == 1
        terminals.append((minute[i - 1], TOP if start else bot()))
        if i == 1:
            body = Not(m(1))
        else:
            body = big_or([
                And(s(i), Not(m(i))),
                And(And(s(i - 1), Not(s(i))), Not(m(i))),
                And(And(Not(s(i - 1)), Not(s(i))), m(i)),
            ])
        clauses.append(IterationClause(minute[i - 1], (ch,), (m(i),), body))
    for i in range(1, ell + 1):
        terminals.append((second[i - 1], TOP if (offset == 2 and i == 1) else bot()))
        body = m(1) if i == 1 else And(s(i - 1), m(i))
        clauses.append(IterationClause(second[i - 1], (ch,), (body,), bot()))
    disagree = [Not(iff(s(1), m(1)))]
    disagree += [Not(iff(s(i), And(s(i - 1), m(i)))) for i in range(2, ell + 1)]
    terminals.append((changing, TOP if offset in (1, 2) else bot()))
    clauses.append(IterationClause(changing, (ch,), (big_or(disagree),), TOP))
    return ClockFragment(minute, second, changing, terminals, clauses)


def clock_program(ell: int, offset: int = 0) -> Program:
    frag = build_clock(ell, offset)
    return make_program("cmsc", frag.terminals, frag.clauses)


# ---------------------------------------------------------------------------
# Simulating indexed diamonds with plain ones
# ---------------------------------------------------------------------------

@dataclass
class DiamondSimulator:
    """Clocks plus scanning flags that make the <i> macro work.

    ``macro(i, phi)`` is true exactly when phi holds at the ith neighbour,
    but only at the right moments of the scan cycle; rules reading it must
    be gated as in eliminate_indexed_diamonds.
    """

    id_props: tuple[str, ...]
    max_index: int
    reset: str
    not_same: str
    id_flag: str
    flags: tuple[str, ...]
    terminals: list[tuple[str, Schema]]
    clauses: list[IterationClause]

    @property
    def heads(self) -> tuple[str, ...]:
        return tuple(h for h, _ in self.terminals)

    def macro(self, i: int, phi: Schema) -> Schema:
        if not 1 <= i <= self.max_index:
            raise CompileError(f"diamond index {i} outside simulator range")
        guard = Not(Var(self.flags[i - 1]))
        if i > 1:
            guard = And(Not(Var(self.flags[i - 1])), Var(self.flags[i - 2]))
        return And(guard, Diamond(And(phi, Var(self.id_flag))))


def build_diamond_simulator(id_props, max_index: int) -> DiamondSimulator:
    """Basic, forward and double-forward clocks over the ID bits, plus the
    reset/not-same/own-ID flags and the neighbour flags N1..N_max."""
    id_props = tuple(id_props)
    ell = len(id_props)
    if ell < 2:
        raise CompileError("diamond simulation needs at least 2 ID bits")
    basic = build_clock(ell, 0)
    forward = build_clock(ell, 1)
    double = build_clock(ell, 2)

    terminals = basic.terminals + forward.terminals + double.terminals
    clauses = basic.clauses + forward.clauses + double.clauses

    reset, not_same, id_flag = "Xreset", "Xnotsame", "Xid"
    terminals.append((reset, bot()))
    clauses.append(plain(reset, And(
        big_and([Not(Var(x)) for x in double.minute]),
        big_and([Var(x) for x in forward.minute]),
    )))
    terminals.append((not_same, TOP))
    clauses.append(plain(not_same, big_or([
        Not(iff(Var(a), Var(b))) for a, b in zip(basic.minute, forward.minute)
    ])))
    terminals.append((id_flag, big_and([Not(Prop(q)) for q in id_props])))
    clauses.append(plain(id_flag, big_and([
        iff(Var(a), Prop(q)) for a, q in zip(forward.minute, id_props)
    ])))

    flags = tuple(f"N{i}" for i in range(1, max_index + 1))
    for i in range(1, max_index + 1):
        cond2 = And(Not(Var(flags[i - 1])), Var(not_same))
        if i > 1:
            cond2 = And(And(Not(Var(flags[i - 1])), Var(flags[i - 2])), Var(not_same))
        terminals.append((flags[i - 1], bot()))
        clauses.append(IterationClause(
            flags[i - 1],
            (Var(reset), cond2),
            (bot(), Diamond(Var(id_flag))),
            Var(flags[i - 1]),
        ))
    return DiamondSimulator(
        id_props, max_index, reset, not_same, id_flag, flags, terminals, clauses
    )


def eliminate_indexed_diamonds(p: Program, id_props) -> tuple[Program, TranslationReport]:
    """Equivalent CMSC program scanning neighbours by ID to realize each <i>.

    The returned report's round mapping says how source rounds map onto
    target rounds: source round n is read off at the round after the nth
    truth of the reset flag (round 0 maps to round 0).
    """
    if p.variant != "mpmsc":
        raise CompileError("eliminate_indexed_diamonds expects an mpmsc program")
    sim = build_diamond_simulator(id_props, max(1, metrics(p).max_diamond_index))

    subecho: dict[Schema, str] = {}
    order: list[Schema] = []
    for h in p.head_order:
        for s in p.iterations[h].bodies():
            for node in walk(s):
                if isinstance(node, DiamondI) and node not in subecho:
                    subecho[node] = ""
                    order.append(node)
    counters: dict[int, int] = {}
    for node in order:
        counters[node.index] = counters.get(node.index, 0) + 1
        subecho[node] = f"Xd{node.index}_{counters[node.index]}"

    table = {node: Var(name) for node, name in subecho.items()}

    terminals = [(h, p.terminals[h]) for h in p.head_order]
    clauses: list[IterationClause] = []
    for h in p.head_order:
        clause = p.iterations[h]
        conds = tuple(rewrite(c, table) for c in clause.conditions)
        conss = tuple(rewrite(c, table) for c in clause.consequences)
        backup = rewrite(clause.backup, table)
        if clause.is_conditional:
            clauses.append(IterationClause(
                h, (Not(Var(sim.reset)),) + conds, (Var(h),) + conss, backup
            ))
        else:
            clauses.append(IterationClause(h, (Var(sim.reset),), (backup,), Var(h)))

    terminals += sim.terminals
    clauses += sim.clauses
    for node in order:
        name = subecho[node]
        i = node.index
        # Capture exactly when the scan would discover neighbour i (the same
        # condition that flips N_i); a plain !N_i gate would re-capture on
        # later rows of the maximal-ID neighbour's block and corrupt indices
        # beyond the out-degree.
        gate = And(Not(Var(sim.flags[i - 1])), Var(sim.not_same))
        if i > 1:
            gate = And(And(Not(Var(sim.flags[i - 1])), Var(sim.flags[i - 2])),
                       Var(sim.not_same))
        terminals.append((name, bot()))
        clauses.append(IterationClause(
            name,
            (gate,),
            (sim.macro(i, node.sub),),
            Var(name),
        ))

    program = make_program("cmsc", terminals, clauses, p.attention, p.prints)
    report = TranslationReport(
        "eliminate_indexed_diamonds", program_metrics(p), program_metrics(program),
        f"O(2^{len(tuple(id_props))}) target rounds per source round",
        {"kind": "reset-gated", "reset_head": sim.reset},
    )
    return program, report


# ---------------------------------------------------------------------------
# MSC normal form
# ---------------------------------------------------------------------------

def terminal_depth_zero(p: Program) -> tuple[Program, TranslationReport]:
    """Equivalent MSC program with modal depth 0 terminals; the transformed
    program shows the source's round-n configuration in round n+1."""
    if p.variant != "msc":
        raise CompileError("terminal_depth_zero expects an msc program")
    if metrics(p).mdt == 0:
        report = TranslationReport(
            "terminal_depth_zero", program_metrics(p), program_metrics(p),
            "none (already depth 0)", {"kind": "shift", "shift": 0},
        )
        return p, report

    taken = set(p.head_order)
    renames: dict[str, str] = {}
    for h in p.head_order:
        new = fresh_name(f"{h}s", taken)
        taken.add(new)
        renames[h] = new
    flag = fresh_name("Iflag", taken)
    mapping = {h: Var(renames[h]) for h in p.head_order}

    terminals = [(renames[h], bot()) for h in p.head_order]
    clauses = [
        IterationClause(
            renames[h],
            (Var(flag),),
            (substitute_vars(p.iterations[h].backup, mapping),),
            p.terminals[h],
        )
        for h in p.head_order
    ]
    terminals.append((flag, bot()))
    clauses.append(plain(flag, TOP))
    conditional = make_program(
        "cmsc", terminals, clauses,
        {renames[h] for h in p.attention},
        {renames[h] for h in p.prints},
    )
    program, _ = cmsc_to_msc(conditional)
    report = TranslationReport(
        "terminal_depth_zero", program_metrics(p), program_metrics(program),
        "source round n = target round n+1", {"kind": "shift", "shift": 1},
    )
    return program, report


def _collect_diamond_subschemata(p: Program) -> list[Schema]:
    seen: set[Schema] = set()
    order: list[Schema] = []
    for h in p.head_order:
        for node in walk(p.iterations[h].backup):
            if isinstance(node, Diamond) and node not in seen:
                seen.add(node)
                order.append(node)
    return order


def to_msc1_conditional(p: Program) -> tuple[Program, TranslationReport]:
    """The intermediate conditional program of the MSC[1] construction:
    one fresh head per diamond subschema, stratified by modal depth and
    gated on a clock of length mdi."""
    if p.variant != "msc":
        raise CompileError("to_msc1 expects an msc program")
    base, shift_report = terminal_depth_zero(p)
    mdi = metrics(base).mdi
    if mdi <= 1:
        report = TranslationReport(
            "to_msc1", program_metrics(p), program_metrics(base),
            shift_report.time_dilation,
            {"kind": "dilation", "factor": 1,
             "shift": shift_report.round_mapping.get("shift", 0)},
        )
        return base, report

    taken = set(base.head_order)
    copies: dict[str, str] = {}
    for h in base.head_order:
        copies[h] = fresh_name(f"{h}m", taken)
        taken.add(copies[h])
    clock = []
    for i in range(1, mdi + 1):
        name = fresh_name(f"T{i}", taken)
        taken.add(name)
        clock.append(name)

    diamonds = _collect_diamond_subschemata(base)
    by_depth: dict[int, list[Schema]] = {}
    head_of: dict[Schema, str] = {}
    for s in diamonds:
        depth = modal_depth(s)
        if depth <= mdi - 1:
            by_depth.setdefault(depth, []).append(s)
            name = fresh_name(name_for_schema(s), taken)
            taken.add(name)
            head_of[s] = name

    def star(s: Schema) -> Schema:
        """Replace inner diamond subschemata by their heads, heads by copies."""
        if isinstance(s, Diamond):
            if s in head_of:
                return Var(head_of[s])
            return Diamond(star(s.sub))
        if isinstance(s, Var):
            return Var(copies[s.name])
        if isinstance(s, Not):
            return Not(star(s.sub))
        if isinstance(s, And):
            return And(star(s.left), star(s.right))
        return s

    terminals = [(copies[h], base.terminals[h]) for h in base.head_order]
    clauses = [
        IterationClause(
            copies[h], (Var(clock[mdi - 1]),),
            (star(base.iterations[h].backup),), Var(copies[h]),
        )
        for h in base.head_order
    ]
    terminals.append((clock[0], TOP))
    clauses.append(plain(clock[0], Var(clock[mdi - 1])))
    for i in range(1, mdi):
        terminals.append((clock[i], bot()))
        clauses.append(plain(clock[i], Var(clock[i - 1])))
    for depth in sorted(by_depth):
        for s in by_depth[depth]:
            name = head_of[s]
            terminals.append((name, bot()))
            clauses.append(IterationClause(
                name, (Var(clock[depth - 1]),), (Diamond(star(s.sub)),), Var(name),
            ))

    program = make_program(
        "cmsc", terminals, clauses,
        {copies[h] for h in base.attention},
        {copies[h] for h in base.prints},
    )
    report = TranslationReport(
        "to_msc1", program_metrics(p), program_metrics(program),
        f"source round n = target round {mdi}*n (after the depth-zero shift)",
        {"kind": "dilation", "factor": mdi,
         "shift": shift_report.round_mapping.get("shift", 0)},
    )
    return program, report


def to_msc1(p: Program) -> tuple[Program, TranslationReport]:
    """Equivalent MSC[1] program: depth-0 terminals, depth <= 1 iterations."""
    conditional, report = to_msc1_conditional(p)
    if conditional.variant == "msc":
        return conditional, report
    program, _ = cmsc_to_msc(conditional)
    report = TranslationReport(
        "to_msc1", report.source_metrics, program_metrics(program),
        report.time_dilation, report.round_mapping,
    )
    return program, report


# ---------------------------------------------------------------------------
# Composed end-to-end translations
# ---------------------------------------------------------------------------

def _plain_to_indexed(s: Schema, delta: int) -> Schema:
    if isinstance(s, Diamond):
        sub = _plain_to_indexed(s.sub, delta)
        return big_or([DiamondI(i, sub) for i in range(1, delta + 1)])
    if isinstance(s, Not):
        return Not(_plain_to_indexed(s.sub, delta))
    if isinstance(s, And):
        return And(_plain_to_indexed(s.left, delta), _plain_to_indexed(s.right, delta))
    return s


def msc_to_mpc(p: Program, delta: int, props: PropositionSet) -> tuple[MPC, TranslationReport]:
    """Equivalent MPC for (Pi, delta): normal form, then <>phi as the
    disjunction of <i>phi over i in [delta], then the MPMSC-to-MPC step."""
    if delta < 1:
        raise CompileError("msc_to_mpc needs delta >= 1")
    normal, nf_report = to_msc1(p)
    terminals = [(h, normal.terminals[h]) for h in normal.head_order]
    clauses = [
        plain(h, _plain_to_indexed(normal.iterations[h].backup, delta))
        for h in normal.head_order
    ]
    mpmsc = make_program("mpmsc", terminals, clauses, normal.attention, normal.prints)
    mpc, _ = mpmsc_to_mpc(mpmsc, delta, props)
    report = TranslationReport(
        "msc_to_mpc", program_metrics(p), circuit_metrics(mpc.circuit),
        f"O(max(1, md)) = O({max(1, metrics(p).md)}) circuit rounds per source round",
        nf_report.round_mapping,
    )
    return mpc, report


def mpc_to_msc(mpc: MPC) -> tuple[Program, TranslationReport]:
    """Equivalent MSC program: MPC -> MPMSC -> CMSC (diamond scan) -> MSC."""
    mpmsc, stage1 = mpc_to_mpmsc(mpc)
    if len(mpc.props.distinguished) < 2:
        raise CompileError("mpc_to_msc needs at least 2 ID bits to scan")
    cmsc, stage2 = eliminate_indexed_diamonds(mpmsc, mpc.props.distinguished)
    program, _ = cmsc_to_msc(cmsc)
    report = TranslationReport(
        "mpc_to_msc", circuit_metrics(mpc.circuit), program_metrics(program),
        f"O(d + 2^|Pi1|) program rounds per circuit round "
        f"(d = {mpc.circuit.depth}, |Pi1| = {len(mpc.props.distinguished)})",
        {"kind": "composed", "stages": [stage1.round_mapping, stage2.round_mapping]},
    )
    return program, report

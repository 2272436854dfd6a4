"""Boolean-circuit DAGs and message-passing circuits (MPCs).

Gates carry ordered fan-in lists; AND/OR accept any fan-in (0 included: an
empty AND is constant 1, an empty OR constant 0) while NOT takes exactly
one input.  An MPC attaches a proposition set, a degree bound, a state
length and attention/print bit positions to a circuit of matching arity,
and can be executed over a Kripke model as a synchronized system.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .model import KripkeModel, PropositionSet
from .syntax import And, Diamond, DiamondI, Not, Prop, Schema, Top, Var
from .eval import Trace, UnsuitableModel

AND, OR, NOT, INPUT = "AND", "OR", "NOT", "INPUT"
_LABELS = (AND, OR, NOT, INPUT)


class CircuitError(Exception):
    pass


class ArityMismatch(CircuitError):
    pass


class UnexpectedDiamond(CircuitError):
    pass


class OutputArityMismatch(CircuitError):
    pass


@dataclass(frozen=True)
class Gate:
    label: str
    fanin: tuple[int, ...] = ()

    def __post_init__(self):
        if self.label not in _LABELS:
            raise CircuitError(f"unknown gate label {self.label!r}")
        if self.label == NOT and len(self.fanin) != 1:
            raise CircuitError("NOT gate needs fan-in exactly 1")
        if self.label == INPUT and self.fanin:
            raise CircuitError("INPUT gate must have fan-in 0")


@dataclass(frozen=True)
class Circuit:
    """Gate DAG with ordered input and output gates.

    ``gates[i]`` is gate i; ``input_order`` lists every INPUT gate and
    ``output_order`` every zero-fan-out gate, in their I/O order.
    """

    gates: tuple[Gate, ...]
    input_order: tuple[int, ...]
    output_order: tuple[int, ...]

    def __post_init__(self):
        n = len(self.gates)
        fanout = [0] * n
        for g in self.gates:
            for src in g.fanin:
                if not 0 <= src < n:
                    raise CircuitError("fan-in index out of range")
                fanout[src] += 1
        inputs = {i for i, g in enumerate(self.gates) if g.label == INPUT}
        if set(self.input_order) != inputs or len(self.input_order) != len(inputs):
            raise CircuitError("input_order must list every INPUT gate exactly once")
        if len(set(self.output_order)) != len(self.output_order):
            raise CircuitError("duplicate gate in output_order")
        for i in self.output_order:
            if fanout[i] != 0:
                raise CircuitError(f"output gate g{i} has non-zero fan-out")
        dangling = {
            i for i in range(n)
            if fanout[i] == 0 and self.gates[i].label != INPUT
        } - set(self.output_order)
        if dangling:
            raise CircuitError(f"dangling non-input gates: {sorted(dangling)}")
        object.__setattr__(self, "_topo", self._toposort())

    def _toposort(self) -> tuple[int, ...]:
        n = len(self.gates)
        indeg = [len(g.fanin) for g in self.gates]
        consumers: list[list[int]] = [[] for _ in range(n)]
        for i, g in enumerate(self.gates):
            for src in g.fanin:
                consumers[src].append(i)
        ready = [i for i in range(n) if indeg[i] == 0]
        order = []
        while ready:
            i = ready.pop()
            order.append(i)
            for j in consumers[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    ready.append(j)
        if len(order) != n:
            raise CircuitError("circuit contains a cycle")
        return tuple(order)

    @property
    def size(self) -> int:
        return len(self.gates)

    def eval(self, bits) -> tuple[bool, ...]:
        if isinstance(bits, str):
            bits = [c == "1" for c in bits]
        else:
            bits = list(bits)
        if len(bits) != len(self.input_order):
            raise ArityMismatch(
                f"expected {len(self.input_order)} input bits, got {len(bits)}"
            )
        value = [False] * len(self.gates)
        for gate_id, bit in zip(self.input_order, bits):
            value[gate_id] = bit
        for i in self._topo:
            g = self.gates[i]
            if g.label == INPUT:
                continue
            if g.label == AND:
                value[i] = all(value[s] for s in g.fanin)
            elif g.label == OR:
                value[i] = any(value[s] for s in g.fanin)
            else:
                value[i] = not value[g.fanin[0]]
        return tuple(value[i] for i in self.output_order)

    def eval_string(self, bits) -> str:
        return "".join("1" if b else "0" for b in self.eval(bits))

    @cached_property
    def heights(self) -> tuple[int, ...]:
        """Longest path length from a source gate; input gates have height 0."""
        h = [0] * len(self.gates)
        for i in self._topo:
            g = self.gates[i]
            if g.fanin:
                h[i] = 1 + max(h[s] for s in g.fanin)
        return tuple(h)

    @property
    def depth(self) -> int:
        return max((self.heights[o] for o in self.output_order), default=0)

    def max_fanin(self) -> int:
        return max((len(g.fanin) for g in self.gates), default=0)


def depth_and_heights(c: Circuit) -> dict:
    return {"depth": c.depth, "heights": c.heights}


class CircuitBuilder:
    """Incremental circuit construction; finalize with build()."""

    def __init__(self):
        self.gates: list[Gate] = []

    def add(self, label: str, fanin=()) -> int:
        self.gates.append(Gate(label, tuple(fanin)))
        return len(self.gates) - 1

    def input(self) -> int:
        return self.add(INPUT)

    def copy_from(self, other: Circuit) -> list[int]:
        """Copy all gates of another circuit; returns old-id -> new-id map."""
        base = {}
        for i, g in enumerate(other.gates):
            base[i] = self.add(g.label, tuple(base[s] for s in g.fanin))
        return [base[i] for i in range(len(other.gates))]

    def build(self, input_order, output_order) -> Circuit:
        return Circuit(tuple(self.gates), tuple(input_order), tuple(output_order))


# ---------------------------------------------------------------------------
# Formula to circuit
# ---------------------------------------------------------------------------

def formula_to_circuit(f: Schema, inputs: list[str] | None = None) -> tuple[Circuit, tuple[str, ...]]:
    """Tree-shaped circuit of a diamond-free formula (inverse tree representation).

    Proposition and head-predicate names become input labels; repeated labels
    share a single INPUT gate, internal structure is not deduplicated.  Input
    order follows ``inputs`` when given (unused names are skipped), otherwise
    first occurrence.  Returns the circuit and its input label order.
    """
    b = CircuitBuilder()
    gate_of_label: dict[str, int] = {}
    label_order: list[str] = []

    def need(label: str) -> int:
        if label not in gate_of_label:
            gate_of_label[label] = b.input()
            label_order.append(label)
        return gate_of_label[label]

    def rec(s: Schema) -> int:
        if isinstance(s, Top):
            return b.add(AND)
        if isinstance(s, (Prop, Var)):
            return need(s.name)
        if isinstance(s, Not):
            return b.add(NOT, (rec(s.sub),))
        if isinstance(s, And):
            left = rec(s.left)
            right = rec(s.right)
            return b.add(AND, (left, right))
        if isinstance(s, (Diamond, DiamondI)):
            raise UnexpectedDiamond("diamonds cannot appear in a combinational formula")
        raise TypeError(s)

    root = rec(f)
    if inputs is not None:
        missing = set(label_order) - set(inputs)
        if missing:
            raise CircuitError(f"labels {sorted(missing)} not among declared inputs")
        ordered = [name for name in inputs if name in gate_of_label]
    else:
        ordered = label_order
    circuit = b.build([gate_of_label[name] for name in ordered], [root])
    return circuit, tuple(ordered)


# ---------------------------------------------------------------------------
# Message passing circuits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MPC:
    """A circuit for (Pi, delta) with state length k and appointed bits.

    The circuit reads |Pi| + k*(delta+1) bits: the local input, then delta+1
    blocks of k state bits (home block first, then neighbours in ID order,
    zero-padded past the out-degree), and outputs the k-bit next state.
    Attention/print bit positions are 1-based within [k].
    """

    circuit: Circuit
    props: PropositionSet
    delta: int
    state_len: int
    attention_bits: frozenset[int]
    print_bits: frozenset[int]

    def __post_init__(self):
        expected = len(self.props.all) + self.state_len * (self.delta + 1)
        if len(self.circuit.input_order) != expected:
            raise ArityMismatch(
                f"MPC needs {expected} input gates, circuit has {len(self.circuit.input_order)}"
            )
        if len(self.circuit.output_order) != self.state_len:
            raise ArityMismatch(
                f"MPC needs {self.state_len} output gates, circuit has "
                f"{len(self.circuit.output_order)}"
            )
        for pos in self.attention_bits | self.print_bits:
            if not 1 <= pos <= self.state_len:
                raise CircuitError(f"appointed bit {pos} outside [1..{self.state_len}]")

    @property
    def size(self) -> int:
        return self.circuit.size


def check_mpc_suitable(mpc: MPC, m: KripkeModel) -> None:
    if m.props != mpc.props:
        raise UnsuitableModel("model proposition set differs from the MPC's")
    if m.max_out_degree() > mpc.delta:
        raise UnsuitableModel(
            f"model out-degree {m.max_out_degree()} exceeds delta {mpc.delta}"
        )


def run_mpc(mpc: MPC, m: KripkeModel, max_rounds: int) -> Trace:
    """Execute the MPC at every node for rounds 0..max_rounds."""
    check_mpc_suitable(mpc, m)
    k = mpc.state_len
    zero = (False,) * k
    local = [m.local_input_bits(w) for w in m.nodes()]
    orders = [m.neighbor_order(w) for w in m.nodes()]

    def next_config(cur: list[tuple[bool, ...]] | None) -> list[tuple[bool, ...]]:
        out = []
        for w in m.nodes():
            bits = list(local[w])
            if cur is None:
                bits.extend([False] * (k * (mpc.delta + 1)))
            else:
                bits.extend(cur[w])
                for i in range(mpc.delta):
                    nbrs = orders[w]
                    bits.extend(cur[nbrs[i]] if i < len(nbrs) else zero)
            out.append(mpc.circuit.eval(bits))
        return out

    configs = [next_config(None)]
    broadcasters = [frozenset()]
    every = frozenset(m.nodes())
    for _ in range(max_rounds):
        configs.append(next_config(configs[-1]))
        broadcasters.append(every)
    return Trace(
        labels=tuple(f"s{i}" for i in range(1, k + 1)),
        attention_positions=tuple(i - 1 for i in sorted(mpc.attention_bits)),
        print_positions=tuple(i - 1 for i in sorted(mpc.print_bits)),
        configs=configs,
        broadcasters=broadcasters,
    )


# ---------------------------------------------------------------------------
# Netlist I/O
# ---------------------------------------------------------------------------

def circuit_to_netlist(c: Circuit, mpc: MPC | None = None) -> str:
    lines = []
    if mpc is not None:
        pi0 = ", ".join(mpc.props.ordinary)
        pi1 = ", ".join(mpc.props.distinguished)
        lines.append(f"pi: {pi0} ; {pi1}")
        lines.append(f"delta: {mpc.delta}")
        lines.append(f"k: {mpc.state_len}")
        lines.append("A: " + ", ".join(str(i) for i in sorted(mpc.attention_bits)))
        lines.append("P: " + ", ".join(str(i) for i in sorted(mpc.print_bits)))
    lines.append("inputs: " + ", ".join(f"g{i}" for i in c.input_order))
    lines.append("outputs: " + ", ".join(f"g{i}" for i in c.output_order))
    for i, g in enumerate(c.gates):
        if g.label == INPUT:
            lines.append(f"g{i} = INPUT")
        else:
            args = ", ".join(f"g{s}" for s in g.fanin)
            lines.append(f"g{i} = {g.label}({args})")
    return "\n".join(lines) + "\n"


def mpc_to_netlist(mpc: MPC) -> str:
    return circuit_to_netlist(mpc.circuit, mpc)


def _parse_names(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def netlist_to_circuit(text: str) -> Circuit | MPC:
    headers: dict[str, str] = {}
    gate_lines: list[tuple[str, str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line and not line.split("=", 1)[0].strip().endswith(":"):
            name, rhs = (part.strip() for part in line.split("=", 1))
            gate_lines.append((name, rhs))
        elif ":" in line:
            key, value = (part.strip() for part in line.split(":", 1))
            headers[key] = value
        else:
            raise CircuitError(f"cannot parse netlist line {raw!r}")

    index = {name: i for i, (name, _) in enumerate(gate_lines)}
    gates: list[Gate] = []
    for name, rhs in gate_lines:
        if rhs == "INPUT":
            gates.append(Gate(INPUT))
            continue
        op, _, rest = rhs.partition("(")
        op = op.strip()
        if not rest.endswith(")") or op not in (AND, OR, NOT):
            raise CircuitError(f"cannot parse gate {name} = {rhs!r}")
        args = _parse_names(rest[:-1])
        try:
            fanin = tuple(index[a] for a in args)
        except KeyError as exc:
            raise CircuitError(f"gate {name} references unknown gate {exc}") from None
        gates.append(Gate(op, fanin))

    def ids(key: str) -> tuple[int, ...]:
        return tuple(index[name] for name in _parse_names(headers.get(key, "")))

    circuit = Circuit(tuple(gates), ids("inputs"), ids("outputs"))
    if "k" not in headers:
        return circuit
    pi_text = headers.get("pi", ";")
    pi0_text, _, pi1_text = pi_text.partition(";")
    props = PropositionSet(
        ordinary=tuple(_parse_names(pi0_text)),
        distinguished=tuple(_parse_names(pi1_text)),
    )
    return MPC(
        circuit=circuit,
        props=props,
        delta=int(headers["delta"]),
        state_len=int(headers["k"]),
        attention_bits=frozenset(int(x) for x in _parse_names(headers.get("A", ""))),
        print_bits=frozenset(int(x) for x in _parse_names(headers.get("P", ""))),
    )


def save_netlist(obj, path) -> None:
    text = mpc_to_netlist(obj) if isinstance(obj, MPC) else circuit_to_netlist(obj)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def load_netlist(path) -> Circuit | MPC:
    with open(path, "r", encoding="utf-8") as fh:
        return netlist_to_circuit(fh.read())


def split_fanin(c: Circuit, bound: int = 2) -> Circuit:
    """Rebuild the circuit with every AND/OR of fan-in > bound split into a
    balanced tree of fan-in-bound gates (constant size factor, depth grows
    by O(log fan-in)).  NOT and INPUT gates are untouched."""
    if bound < 2:
        raise CircuitError("fan-in bound must be at least 2")
    b = CircuitBuilder()
    mapping: dict[int, int] = {}

    def tree(label: str, sources: list[int]) -> int:
        if len(sources) <= bound:
            return b.add(label, tuple(sources))
        groups = []
        step = bound
        for i in range(0, len(sources), step):
            chunk = sources[i:i + step]
            groups.append(b.add(label, tuple(chunk)) if len(chunk) > 1 else chunk[0])
        return tree(label, groups)

    for i in c._topo:
        gate = c.gates[i]
        if gate.label == INPUT:
            mapping[i] = b.input()
        elif gate.label == NOT:
            mapping[i] = b.add(NOT, (mapping[gate.fanin[0]],))
        else:
            sources = [mapping[s] for s in gate.fanin]
            if len(sources) <= bound:
                mapping[i] = b.add(gate.label, tuple(sources))
            else:
                mapping[i] = tree(gate.label, sources)
    return b.build([mapping[g] for g in c.input_order],
                   [mapping[g] for g in c.output_order])

"""Round-based semantics for all program variants.

Evaluation is per node per round over global configurations; the exponential
formula-expansion semantics is implemented only as a cross-checking oracle
(`expand_iteration_formula` + `model_check`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import KripkeModel
from .syntax import (
    And, Diamond, DiamondI, IterationClause, Not, Program, Prop, Schema, Top, Var,
    big_and, big_or, children, has_diamond, has_var, prop_names, substitute_vars,
)


class EvalError(Exception):
    pass


class UnsuitableModel(EvalError):
    pass


class TooLarge(EvalError):
    pass


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------

@dataclass
class Trace:
    """Per-node per-round states plus derived acceptance data.

    ``configs[r][w]`` is the state tuple of node w in round r.  Bit i of a
    state is the truth of ``labels[i]``.  ``broadcasters[r]`` is the set of
    nodes with a broadcasting clause in round r; ``comm_rounds`` are the
    global communication rounds (at least one broadcaster).
    """

    labels: tuple[str, ...]
    attention_positions: tuple[int, ...]
    print_positions: tuple[int, ...]
    configs: list[list[tuple[bool, ...]]]
    broadcasters: list[frozenset[int]]
    comm_rounds: set[int] = field(init=False)

    def __post_init__(self):
        self.comm_rounds = {r for r, b in enumerate(self.broadcasters) if b}

    @property
    def rounds(self) -> int:
        return len(self.configs)

    @property
    def n(self) -> int:
        return len(self.configs[0])

    @property
    def appointed_positions(self) -> tuple[int, ...]:
        keep = set(self.attention_positions) | set(self.print_positions)
        return tuple(i for i in range(len(self.labels)) if i in keep)

    def state_string(self, r: int, w: int) -> str:
        return "".join("1" if b else "0" for b in self.configs[r][w])

    def _substring(self, r: int, w: int, positions) -> str:
        bits = self.configs[r][w]
        return "".join("1" if bits[i] else "0" for i in positions)

    def appointed_string(self, r: int, w: int) -> str:
        return self._substring(r, w, self.appointed_positions)

    def attention_string(self, r: int, w: int) -> str:
        return self._substring(r, w, self.attention_positions)

    def print_string(self, r: int, w: int) -> str:
        return self._substring(r, w, self.print_positions)

    def acceptance_round(self, w: int) -> int | None:
        """First round with an attention bit set, if within the trace."""
        for r in range(self.rounds):
            bits = self.configs[r][w]
            if any(bits[i] for i in self.attention_positions):
                return r
        return None

    def output(self, w: int) -> str | None:
        r = self.acceptance_round(w)
        return None if r is None else self.print_string(r, w)


def trace_to_text(trace: Trace) -> str:
    lines = []
    for r in range(trace.rounds):
        for w in range(trace.n):
            bcast = 1 if w in trace.broadcasters[r] else 0
            lines.append(
                f"round {r}: {w} {trace.state_string(r, w)}"
                f" [A:{trace.attention_string(r, w)}]"
                f" [P:{trace.print_string(r, w)}]"
                f" bcast:{bcast}"
            )
    return "\n".join(lines) + "\n"


def trace_to_json(trace: Trace) -> dict:
    return {
        "labels": list(trace.labels),
        "attention_positions": list(trace.attention_positions),
        "print_positions": list(trace.print_positions),
        "rounds": trace.rounds,
        "comm_rounds": sorted(trace.comm_rounds),
        "configs": [
            [trace.state_string(r, w) for w in range(trace.n)]
            for r in range(trace.rounds)
        ],
        "broadcasters": [sorted(b) for b in trace.broadcasters],
        "acceptance": {
            str(w): trace.acceptance_round(w) for w in range(trace.n)
        },
        "outputs": {str(w): trace.output(w) for w in range(trace.n)},
    }


# ---------------------------------------------------------------------------
# Program evaluation
# ---------------------------------------------------------------------------

def check_suitable(p: Program, m: KripkeModel) -> None:
    missing = p.proposition_names() - set(m.props.all)
    if missing:
        raise UnsuitableModel(f"model does not interpret {sorted(missing)}")


class ProgramRunner:
    """Compiles a program against one model for fast repeated stepping."""

    def __init__(self, p: Program, m: KripkeModel):
        check_suitable(p, m)
        self.program = p
        self.model = m
        self.head_pos = {h: i for i, h in enumerate(p.head_order)}
        self.succ = [list(m.succ(w)) for w in m.nodes()]
        self.order = [list(m.neighbor_order(w)) for w in m.nodes()]
        self.prop_rows = {
            name: [m.holds(name, w) for w in m.nodes()]
            for name in p.proposition_names()
        }
        self.terminal_fns = [
            self._compile(p.terminals[h]) for h in p.head_order
        ]
        self.clauses = []
        for h in p.head_order:
            clause = p.iterations[h]
            conds = [self._compile(c) for c in clause.conditions]
            bodies = [self._compile(b) for b in clause.bodies()]
            flags = [has_diamond(b) for b in clause.bodies()]
            self.clauses.append((conds, bodies, flags))

    def _compile(self, s: Schema):
        if isinstance(s, Top):
            return lambda w, cur: True
        if isinstance(s, Prop):
            row = self.prop_rows[s.name]
            return lambda w, cur: row[w]
        if isinstance(s, Var):
            i = self.head_pos[s.name]
            return lambda w, cur: cur[w][i]
        if isinstance(s, Not):
            f = self._compile(s.sub)
            return lambda w, cur: not f(w, cur)
        if isinstance(s, And):
            f = self._compile(s.left)
            g = self._compile(s.right)
            return lambda w, cur: f(w, cur) and g(w, cur)
        if isinstance(s, Diamond):
            f = self._compile(s.sub)
            succ = self.succ
            return lambda w, cur: any(f(v, cur) for v in succ[w])
        if isinstance(s, DiamondI):
            f = self._compile(s.sub)
            order = self.order
            i = s.index
            return lambda w, cur: len(order[w]) >= i and f(order[w][i - 1], cur)
        raise TypeError(s)

    def round0(self) -> list[tuple[bool, ...]]:
        empty: list[tuple[bool, ...]] = []
        return [
            tuple(f(w, empty) for f in self.terminal_fns)
            for w in self.model.nodes()
        ]

    def step(self, cur: list[tuple[bool, ...]]):
        """One synchronized round; returns (next configuration, broadcasters)."""
        nxt = []
        broadcasters = set()
        for w in self.model.nodes():
            bits = []
            for conds, bodies, flags in self.clauses:
                chosen = len(conds)
                for i, cf in enumerate(conds):
                    if cf(w, cur):
                        chosen = i
                        break
                bits.append(bodies[chosen](w, cur))
                if flags[chosen]:
                    broadcasters.add(w)
            nxt.append(tuple(bits))
        return nxt, frozenset(broadcasters)


def step(p: Program, m: KripkeModel, values: list[tuple[bool, ...]]):
    """One round of p on m from the given configuration values."""
    nxt, _ = ProgramRunner(p, m).step(values)
    return nxt


def run(p: Program, m: KripkeModel, max_rounds: int) -> Trace:
    """Rounds 0..max_rounds of p on m (the system itself never halts)."""
    runner = ProgramRunner(p, m)
    configs = [runner.round0()]
    broadcasters = [frozenset()]
    for _ in range(max_rounds):
        nxt, bc = runner.step(configs[-1])
        configs.append(nxt)
        broadcasters.append(bc)
    pos = {h: i for i, h in enumerate(p.head_order)}
    return Trace(
        labels=p.head_order,
        attention_positions=tuple(pos[h] for h in p.head_order if h in p.attention),
        print_positions=tuple(pos[h] for h in p.head_order if h in p.prints),
        configs=configs,
        broadcasters=broadcasters,
    )


# ---------------------------------------------------------------------------
# Expansion oracle
# ---------------------------------------------------------------------------

def _expand_clause(clause: IterationClause, prev: dict[str, Schema]) -> Schema:
    conds = [substitute_vars(c, prev) for c in clause.conditions]
    conss = [substitute_vars(c, prev) for c in clause.consequences]
    backup = substitute_vars(clause.backup, prev)
    if not conds:
        return backup
    disjuncts = []
    for k, (cond, cons) in enumerate(zip(conds, conss)):
        earlier = big_and([Not(c) for c in conds[:k]])
        disjuncts.append(And(And(earlier, cond), cons))
    disjuncts.append(And(big_and([Not(c) for c in conds]), backup))
    return big_or(disjuncts)


def _shared_node_count(roots) -> int:
    """Distinct AST nodes reachable from the roots (substitution shares
    subtrees, so this is the real memory/evaluation cost, not the tree size)."""
    seen: set[int] = set()
    stack = list(roots)
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.extend(children(node))
    return len(seen)


def expand_iteration_formula(p: Program, head: str, n: int, budget: int = 500_000) -> Schema:
    """The nth iteration formula of head, by literal substitution (MSC/CMSC)."""
    if p.variant not in ("msc", "cmsc"):
        raise EvalError("expansion oracle is defined for msc/cmsc programs only")
    current: dict[str, Schema] = dict(p.terminals)
    for _ in range(n):
        nxt = {
            h: _expand_clause(p.iterations[h], current) for h in p.head_order
        }
        total = _shared_node_count(nxt.values())
        if total > budget:
            raise TooLarge(f"expansion exceeds budget ({total} > {budget})")
        current = nxt
    return current[head]


def model_check(f: Schema, m: KripkeModel, w: int) -> bool:
    """Standard modal-logic truth of an ML formula at (m, w).

    Truth is memoized per (subformula, node), so formulas produced by the
    expansion oracle (heavily shared ASTs) check in DAG time.
    """
    if has_var(f):
        raise EvalError("model_check needs a Var-free formula")
    missing = prop_names(f) - set(m.props.all)
    if missing:
        raise UnsuitableModel(f"model does not interpret {sorted(missing)}")
    memo: dict[tuple[int, int], bool] = {}

    def rec(s: Schema, v: int) -> bool:
        key = (id(s), v)
        if key in memo:
            return memo[key]
        if isinstance(s, Top):
            out = True
        elif isinstance(s, Prop):
            out = m.holds(s.name, v)
        elif isinstance(s, Not):
            out = not rec(s.sub, v)
        elif isinstance(s, And):
            out = rec(s.left, v) and rec(s.right, v)
        elif isinstance(s, Diamond):
            out = any(rec(s.sub, u) for u in m.succ(v))
        elif isinstance(s, DiamondI):
            u = m.neighbor(v, s.index)
            out = u is not None and rec(s.sub, u)
        else:
            raise TypeError(s)
        memo[key] = out
        return out

    return rec(f, w)

"""Randomized generators, equivalence checkers and size-scaling reports.

Everything is seed-deterministic; a failing equivalence case can be dumped
as standalone reproduction files (model + both artifacts).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .circuit import AND, CircuitBuilder, MPC, NOT, OR, mpc_to_netlist, run_mpc
from .eval import Trace, run
from .model import KripkeModel, PropositionSet, bit_length, validate_model
from .syntax import (
    And, Diamond, DiamondI, IterationClause, Not, Program, Prop, Schema, TOP, Var,
    bot, make_program, print_program,
)


class HarnessError(Exception):
    pass


class TooManyNodes(HarnessError):
    pass


# ---------------------------------------------------------------------------
# Random models
# ---------------------------------------------------------------------------

def random_kripke(n: int, pi0_count: int, delta: int, seed: int,
                  self_loops: bool = True, id_bits: int | None = None) -> KripkeModel:
    """Random model with distinct IDs, random ordinary valuations and random
    edges of out-degree at most delta; deterministic per seed."""
    rng = random.Random(("kripke", n, pi0_count, delta, seed).__repr__())
    ell = bit_length(n) if id_bits is None else id_bits
    if n > 2 ** ell:
        raise TooManyNodes(f"{n} nodes need more than {ell} ID bits")
    ids = rng.sample(range(2 ** ell), n)
    ordinary = tuple(f"q{i}" for i in range(1, pi0_count + 1))
    distinguished = tuple(f"p{i}" for i in range(1, ell + 1))
    valuation: dict[str, set[int]] = {name: set() for name in ordinary + distinguished}
    for w, ident in enumerate(ids):
        for i in range(ell):
            if (ident >> i) & 1:
                valuation[distinguished[i]].add(w)
    for name in ordinary:
        valuation[name] = {w for w in range(n) if rng.random() < 0.5}
    edges: set[tuple[int, int]] = set()
    for w in range(n):
        degree = rng.randint(0, delta)
        pool = list(range(n)) if self_loops else [v for v in range(n) if v != w]
        if degree > len(pool):
            degree = len(pool)
        for v in rng.sample(pool, degree):
            edges.add((w, v))
    model = KripkeModel(
        n=n,
        edges=frozenset(edges),
        valuation={k: frozenset(v) for k, v in valuation.items()},
        props=PropositionSet(ordinary=ordinary, distinguished=distinguished),
    )
    validate_model(model, delta)
    return model


def random_simple_graph(n: int, delta: int, seed: int) -> list[tuple[int, int]]:
    """Random simple undirected graph on ids 1..n with max degree <= delta."""
    rng = random.Random(("graph", n, delta, seed).__repr__())
    degree = {v: 0 for v in range(1, n + 1)}
    edges: set[tuple[int, int]] = set()
    candidates = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    rng.shuffle(candidates)
    for (u, v) in candidates:
        if degree[u] < delta and degree[v] < delta and rng.random() < 0.7:
            edges.add((u, v))
            degree[u] += 1
            degree[v] += 1
    return sorted(edges)


# ---------------------------------------------------------------------------
# Random programs and circuits
# ---------------------------------------------------------------------------

def _random_schema(rng, depth: int, heads, props, indexed: bool,
                   max_index: int, allow_heads=True) -> Schema:
    leaves = [TOP, bot()]
    leaves += [Prop(q) for q in props]
    if allow_heads:
        leaves += [Var(h) for h in heads]
    if depth <= 0:
        choice = rng.random()
        if choice < 0.55 or len(leaves) == 2:
            return rng.choice(leaves)
        if choice < 0.75:
            return Not(rng.choice(leaves))
        return And(rng.choice(leaves), rng.choice(leaves))
    roll = rng.random()
    if roll < 0.3:
        sub = _random_schema(rng, depth - 1, heads, props, indexed, max_index, allow_heads)
        if indexed:
            return DiamondI(rng.randint(1, max_index), sub)
        return Diamond(sub)
    if roll < 0.5:
        return Not(_random_schema(rng, depth, heads, props, indexed, max_index, allow_heads))
    if roll < 0.8:
        return And(
            _random_schema(rng, depth - 1, heads, props, indexed, max_index, allow_heads),
            _random_schema(rng, depth, heads, props, indexed, max_index, allow_heads),
        )
    return rng.choice(leaves)


def random_program(variant: str, seed: int, heads: int = 3, pi0: int = 1,
                   id_bits: int = 2, max_depth: int = 2, max_index: int = 2) -> Program:
    """Random program of the given variant; deterministic per seed."""
    rng = random.Random((variant, seed, heads, pi0, id_bits, max_depth, max_index).__repr__())
    names = [f"X{i}" for i in range(1, heads + 1)]
    props = [f"q{i}" for i in range(1, pi0 + 1)] + [f"p{i}" for i in range(1, id_bits + 1)]
    indexed = variant in ("mmsc", "mpmsc")
    conditional = variant in ("cmsc", "mpmsc")
    term_depth = 0 if variant == "mpmsc" else max_depth
    body_depth = 1 if variant == "mpmsc" else max_depth

    terminals = []
    clauses = []
    for h in names:
        terminals.append((h, _random_schema(
            rng, rng.randint(0, term_depth), names, props, indexed, max_index,
            allow_heads=False,
        )))
        n_conds = rng.choice([0, 0, 1, 2]) if conditional else 0
        conds = tuple(
            _random_schema(rng, 0 if variant == "mpmsc" else rng.randint(0, body_depth),
                           names, props, indexed, max_index)
            for _ in range(n_conds)
        )
        conss = tuple(
            _random_schema(rng, rng.randint(0, body_depth), names, props, indexed, max_index)
            for _ in range(n_conds)
        )
        backup = _random_schema(rng, rng.randint(0, body_depth), names, props,
                                indexed, max_index)
        clauses.append(IterationClause(h, conds, conss, backup))
    k = len(names)
    attention = set(rng.sample(names, rng.randint(1, k)))
    prints = set(rng.sample(names, rng.randint(1, k)))
    return make_program(variant, terminals, clauses, attention, prints)


def random_mpc(seed: int, k: int = 2, delta: int = 2, pi0: int = 1,
               id_bits: int = 2, depth: int = 3) -> MPC:
    """Random fan-in-<=2 MPC built backwards from the outputs, so every
    internal gate feeds something; deterministic per seed."""
    rng = random.Random(("mpc", seed, k, delta, pi0, id_bits, depth).__repr__())
    props = PropositionSet(
        ordinary=tuple(f"q{i}" for i in range(1, pi0 + 1)),
        distinguished=tuple(f"p{i}" for i in range(1, id_bits + 1)),
    )
    b = CircuitBuilder()
    inputs = [b.input() for _ in range(len(props.all) + k * (delta + 1))]

    def expr(d: int) -> int:
        roll = rng.random()
        if d <= 0 or roll < 0.25:
            return rng.choice(inputs)
        if roll < 0.45:
            return b.add(NOT, (expr(d - 1),))
        label = AND if roll < 0.75 else OR
        return b.add(label, (expr(d - 1), expr(rng.randint(0, d - 1))))

    outputs = []
    for _ in range(k):
        gate = expr(depth)
        # Output gates must be fresh sinks; wrap reused gates in identity ANDs.
        if gate in outputs or gate in inputs:
            gate = b.add(AND, (gate,))
        outputs.append(gate)
    circuit = b.build(inputs, outputs)
    attention = frozenset(rng.sample(range(1, k + 1), rng.randint(1, k)))
    prints = frozenset(rng.sample(range(1, k + 1), rng.randint(1, k)))
    return MPC(circuit=circuit, props=props, delta=delta, state_len=k,
               attention_bits=attention, print_bits=prints)


# ---------------------------------------------------------------------------
# Equivalence checking
# ---------------------------------------------------------------------------

@dataclass
class EquivalenceSpec:
    """What to compare and for how long.

    kind: "strong" (appointed strings every round), "strong_communication"
    (circuit appointed sequence vs program appointed strings at {0} u G) or
    "acceptance" (same output or both silent).  round_mapping maps a source
    round to the target round showing the same logical state, as produced in
    translation reports.
    """

    kind: str
    round_budget: int = 64
    round_mapping: dict | None = None
    target_budget: int | None = None

    def __post_init__(self):
        if self.kind not in ("strong", "strong_communication", "acceptance"):
            raise HarnessError(f"unknown equivalence kind {self.kind!r}")


@dataclass
class CheckReport:
    kind: str
    cases: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def add_failure(self, **info):
        self.failures.append(info)

    def to_json(self) -> dict:
        return {"kind": self.kind, "cases": self.cases,
                "passed": self.passed, "failures": self.failures}

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.kind}: {self.cases} cases"
        if self.failures:
            text += f", first failure: {self.failures[0]}"
        return text


def run_artifact(x, m: KripkeModel, rounds: int) -> Trace:
    if isinstance(x, MPC):
        return run_mpc(x, m, rounds)
    return run(x, m, rounds)


def _reset_rounds(trace: Trace, reset_head: str) -> list[int]:
    pos = trace.labels.index(reset_head)
    return [r for r in range(trace.rounds) if trace.configs[r][0][pos]]


def map_round(mapping: dict | None, n: int, target_trace: Trace | None = None) -> int:
    """Target round showing the source's round-n state."""
    if not mapping or mapping.get("kind") == "identity":
        return n
    kind = mapping["kind"]
    if kind == "shift":
        return n + mapping["shift"]
    if kind == "dilation":
        return mapping["factor"] * (n + mapping.get("shift", 0))
    if kind == "periodic":
        return (n + 1) * mapping["period"]
    if kind == "reset-gated":
        if n == 0:
            return 0
        resets = _reset_rounds(target_trace, mapping["reset_head"])
        if len(resets) < n:
            raise HarnessError("target trace too short for reset mapping")
        return resets[n - 1] + 1
    if kind == "composed":
        stages = mapping["stages"]
        for stage in stages:
            n = map_round(stage, n, target_trace)
        return n
    raise HarnessError(f"unknown round mapping {mapping!r}")


def _target_budget(mapping: dict | None, budget: int, cycle_hint: int = 4096) -> int:
    if not mapping or mapping.get("kind") == "identity":
        return budget
    kind = mapping["kind"]
    if kind == "shift":
        return budget + mapping["shift"]
    if kind == "dilation":
        return mapping["factor"] * (budget + mapping.get("shift", 0) + 1)
    if kind == "periodic":
        return (budget + 2) * mapping["period"]
    if kind == "reset-gated":
        return (budget + 2) * cycle_hint + 2
    if kind == "composed":
        for stage in mapping["stages"]:
            budget = _target_budget(stage, budget, cycle_hint)
        return budget
    raise HarnessError(f"unknown round mapping {mapping!r}")


def check_equivalence(x, y, spec: EquivalenceSpec, models,
                      repro_dir=None, cycle_hint: int = 4096) -> CheckReport:
    """Check x against y on each model; x is the source artifact and y the
    translated one (round mappings send x-rounds to y-rounds)."""
    report = CheckReport(kind=spec.kind)
    for idx, m in enumerate(models):
        report.cases += 1
        failure = _check_one(x, y, spec, m, cycle_hint)
        if failure is not None:
            failure["model"] = idx
            report.add_failure(**failure)
            if repro_dir is not None:
                _dump_repro(Path(repro_dir), idx, x, y, m, failure)
    return report


def _check_one(x, y, spec: EquivalenceSpec, m: KripkeModel, cycle_hint: int) -> dict | None:
    budget = spec.round_budget
    if spec.kind == "strong":
        tx = run_artifact(x, m, budget)
        ty = run_artifact(y, m, _target_budget(spec.round_mapping, budget, cycle_hint))
        if len(tx.appointed_positions) != len(ty.appointed_positions):
            return {"reason": "appointed widths differ"}
        for n in range(budget + 1):
            rn = map_round(spec.round_mapping, n, ty)
            for w in range(m.n):
                a = tx.appointed_string(n, w)
                b = ty.appointed_string(rn, w)
                if a != b:
                    return {"round": n, "target_round": rn, "node": w,
                            "source": a, "target": b}
        return None

    if spec.kind == "strong_communication":
        mpc, prog = (x, y) if isinstance(x, MPC) else (y, x)
        tp = run_artifact(prog, m, _target_budget(
            {"kind": "periodic", "period": max(mpc.circuit.depth, 1) + 1}, budget))
        samples = [0] + sorted(tp.comm_rounds)
        usable = min(budget + 1, len(samples) - 1)
        tc = run_artifact(mpc, m, usable)
        for w in range(m.n):
            if any(c == "1" for c in tp.appointed_string(0, w)):
                return {"round": 0, "node": w,
                        "reason": "program appointed string not blank at round 0"}
        for n in range(usable):
            rn = samples[n + 1]
            for w in range(m.n):
                a = tc.appointed_string(n, w)
                b = tp.appointed_string(rn, w)
                if a != b:
                    return {"circuit_round": n, "program_round": rn, "node": w,
                            "source": a, "target": b}
        return None

    # acceptance
    tx = run_artifact(x, m, budget)
    if spec.target_budget is not None:
        ty = run_artifact(y, m, spec.target_budget)
        y_budget = spec.target_budget
    else:
        ty = run_artifact(y, m, _target_budget(spec.round_mapping, budget, cycle_hint))
        try:
            y_budget = map_round(spec.round_mapping, budget + 1, ty) - 1
        except HarnessError:
            y_budget = ty.rounds - 1
    for w in range(m.n):
        ax = tx.acceptance_round(w)
        ay = ty.acceptance_round(w)
        if ay is not None and ay > y_budget:
            ay = None
        if (ax is None) != (ay is None):
            return {"node": w, "reason": "one side silent",
                    "source_round": ax, "target_round": ay}
        if ax is None:
            continue
        if tx.output(w) != ty.output(w):
            return {"node": w, "source_output": tx.output(w),
                    "target_output": ty.output(w)}
    return None


def _dump_repro(root: Path, idx: int, x, y, m: KripkeModel, failure: dict):
    import json

    from .model import model_to_json

    root.mkdir(parents=True, exist_ok=True)
    (root / f"case{idx}_model.json").write_text(
        json.dumps(model_to_json(m), indent=2), encoding="utf-8")
    for tag, art in (("source", x), ("target", y)):
        path = root / f"case{idx}_{tag}"
        if isinstance(art, MPC):
            path.with_suffix(".netlist").write_text(mpc_to_netlist(art), encoding="utf-8")
        else:
            path.with_suffix(".msc").write_text(print_program(art), encoding="utf-8")
    (root / f"case{idx}_failure.json").write_text(
        json.dumps(failure, indent=2, default=str), encoding="utf-8")


# ---------------------------------------------------------------------------
# Size scaling
# ---------------------------------------------------------------------------

@dataclass
class ScalingReport:
    name: str
    pairs: list[tuple[int, int]]
    bound: float

    @property
    def max_ratio(self) -> float:
        return max(out / max(1, src) for src, out in self.pairs)

    @property
    def passed(self) -> bool:
        return self.max_ratio <= self.bound

    def to_json(self) -> dict:
        return {"name": self.name, "pairs": self.pairs, "bound": self.bound,
                "max_ratio": self.max_ratio, "passed": self.passed}

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} size-scaling {self.name}: max ratio "
                f"{self.max_ratio:.2f} vs bound {self.bound}")


def size_scaling_report(name: str, pairs, bound: float) -> ScalingReport:
    """Pairs of (input size, output size); asserts max ratio <= bound."""
    return ScalingReport(name=name, pairs=[tuple(p) for p in pairs], bound=bound)

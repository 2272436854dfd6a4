"""Named verification suites: the executable form of the toolkit's claims.

Each suite returns a SuiteResult with one detail line per sub-check; the
CLI's ``verify`` command and the acceptance tests run the same functions.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from . import compile as comp
from .circuit import AND, CircuitBuilder, NOT, OR
from .colevishkin import (
    CvParams, check_coloring, cv_head_count, direct_cv_oracle, generate_cv7,
    run_cv,
)
from .eval import expand_iteration_formula, model_check, run
from .harness import (
    CheckReport, EquivalenceSpec, check_equivalence, random_kripke, random_mpc,
    random_program, random_simple_graph, size_scaling_report,
)
from .model import KripkeModel, PropositionSet
from .syntax import metrics


@dataclass
class SuiteResult:
    name: str
    passed: bool = True
    lines: list[str] = field(default_factory=list)
    elapsed: float = 0.0
    scaling: list = field(default_factory=list)

    def check(self, ok: bool, label: str):
        self.passed = self.passed and ok
        self.lines.append(f"{'PASS' if ok else 'FAIL'} {label}")

    def absorb(self, report: CheckReport, label: str):
        detail = "" if report.passed else f" first failure: {report.failures[0]}"
        self.check(report.passed, f"{label} ({report.cases} cases){detail}")

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} suite {self.name} ({self.elapsed:.1f}s)"


def _timed(fn):
    def wrapper(seed: int = 0, cases: int | None = None) -> SuiteResult:
        start = time.time()
        result = fn(seed, cases)
        result.elapsed = time.time() - start
        return result
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ---------------------------------------------------------------------------
# 1. Semantics oracle
# ---------------------------------------------------------------------------

@_timed
def suite_semantics(seed: int = 0, cases: int | None = None) -> SuiteResult:
    """Configurations at rounds 0..4 match truth of the expanded iteration
    formulas on random MSC/CMSC programs and random models."""
    result = SuiteResult("semantics")
    programs = cases or 50
    mismatches = 0
    checked = 0
    for idx in range(programs):
        variant = "msc" if idx % 2 == 0 else "cmsc"
        p = random_program(variant, seed * 1000 + idx, heads=2 + idx % 3,
                           pi0=1, id_bits=2, max_depth=2)
        expansions = {
            (h, n): expand_iteration_formula(p, h, n)
            for h in p.head_order for n in range(5)
        }
        for m_idx in range(10):
            m = random_kripke(2 + (idx + m_idx) % 3, 1, 2,
                              seed * 77 + idx * 10 + m_idx)
            trace = run(p, m, 4)
            for (h, n), formula in expansions.items():
                for w in m.nodes():
                    checked += 1
                    if trace.configs[n][w][p.head_index(h)] != model_check(formula, m, w):
                        mismatches += 1
    result.check(mismatches == 0,
                 f"expansion oracle agreement ({programs} programs, "
                 f"{checked} point checks, {mismatches} mismatches)")
    return result


# ---------------------------------------------------------------------------
# 2. Clock golden
# ---------------------------------------------------------------------------

CLOCK4_GOLDEN = [
    "0000 0000 0",
    "0001 0000 1",
    "0001 0001 1",
    "0001 0001 0",
    "0010 0000 1",
    "0010 0000 0",
    "0011 0000 1",
    "0011 0001 1",
    "0011 0011 1",
    "0011 0011 0",
    "0100 0000 1",
]


def _clock_rows(ell: int, rounds: int):
    program = comp.clock_program(ell, 0)
    frag = comp.build_clock(ell, 0)
    model = KripkeModel(n=1, edges=frozenset(), valuation={},
                        props=PropositionSet(distinguished=("p1",)))
    trace = run(program, model, rounds)
    m_idx = [program.head_index(h) for h in frag.minute]
    s_idx = [program.head_index(h) for h in frag.second]
    c_idx = program.head_index(frag.changing)
    rows = []
    for r in range(rounds + 1):
        bits = trace.configs[r][0]
        minute = "".join("1" if bits[i] else "0" for i in reversed(m_idx))
        second = "".join("1" if bits[i] else "0" for i in reversed(s_idx))
        rows.append(f"{minute} {second} {int(bits[c_idx])}")
    return rows


@_timed
def suite_clock(seed: int = 0, cases: int | None = None) -> SuiteResult:
    """build_clock(4) byte-matches the golden trace rows and enumerates all
    16 minute strings lexicographically before wrapping."""
    result = SuiteResult("clock")
    rows = _clock_rows(4, 130)
    result.check(rows[:11] == CLOCK4_GOLDEN, "rows 0-10 match the golden trace")
    minutes = []
    for row in rows:
        value = int(row.split()[0], 2)
        if not minutes or minutes[-1] != value:
            minutes.append(value)
    result.check(minutes[:17] == list(range(16)) + [0],
                 "minute hand walks 0..15 lexicographically and wraps")
    shapes_ok = all(
        set(row.split()[1].lstrip("0").rstrip("1")) == set()
        for row in rows
    )
    result.check(shapes_ok, "second hand always of shape 0^i 1^j")
    return result


# ---------------------------------------------------------------------------
# 3. Diamond-simulation golden
# ---------------------------------------------------------------------------

DIAMOND_GOLDEN_HEAD = {
    0: ("000", "001", 0, 1, 0, 0, 0),
    1: ("001", "001", 0, 1, 1, 0, 0),
    2: ("001", "001", 0, 0, 1, 0, 0),
    3: ("001", "010", 0, 0, 1, 0, 0),
    4: ("010", "010", 0, 1, 1, 0, 0),
    5: ("010", "011", 0, 0, 1, 1, 0),
    6: ("011", "011", 0, 1, 1, 1, 0),
}

DIAMOND_GOLDEN_BLOCK = {
    0: ("110", "111", 0, 0, 1, 1, 0),
    1: ("111", "111", 0, 1, 1, 1, 0),
    2: ("111", "111", 0, 0, 1, 1, 1),
    3: ("111", "111", 0, 0, 1, 1, 1),
    4: ("111", "111", 0, 0, 1, 1, 1),
    5: ("111", "000", 1, 0, 1, 1, 1),
    6: ("000", "000", 0, 1, 0, 0, 0),
    7: ("000", "001", 0, 0, 1, 0, 0),
    8: ("001", "001", 0, 1, 1, 0, 0),
}


def _diamond_scenario():
    props = PropositionSet(distinguished=("p1", "p2", "p3"))
    valuation = {
        "p1": frozenset({0, 3}),
        "p2": frozenset({2, 3}),
        "p3": frozenset({3}),
    }
    model = KripkeModel(n=4, edges=frozenset({(0, 1), (0, 2), (0, 3)}),
                        valuation=valuation, props=props)
    sim = comp.build_diamond_simulator(("p1", "p2", "p3"), 3)
    program = comp.make_program("cmsc", sim.terminals, sim.clauses)
    return program, model, sim


@_timed
def suite_diamond(seed: int = 0, cases: int | None = None) -> SuiteResult:
    """The neighbour-scan run for IDs {000, 010, 111} matches the golden
    N/X_reset/X_not_same columns."""
    result = SuiteResult("diamond")
    program, model, sim = _diamond_scenario()
    trace = run(program, model, 60)
    basic = comp.build_clock(3, 0)
    forward = comp.build_clock(3, 1)
    idx = {h: program.head_index(h) for h in program.head_order}

    def bit(r, name):
        return int(trace.configs[r][0][idx[name]])

    def minute(r, frag):
        return "".join(str(int(trace.configs[r][0][idx[h]])) for h in reversed(frag.minute))

    def row(r):
        return (minute(r, basic), minute(r, forward), bit(r, sim.reset),
                bit(r, sim.not_same), bit(r, "N1"), bit(r, "N2"), bit(r, "N3"))

    k = next(r for r in range(59)
             if minute(r, basic) == "110" and minute(r + 1, basic) == "111")
    head_ok = all(row(r) == want for r, want in DIAMOND_GOLDEN_HEAD.items())
    block_ok = all(row(k + dr) == want for dr, want in DIAMOND_GOLDEN_BLOCK.items())
    result.check(head_ok, "rows 0-6 match the golden table")
    result.check(block_ok, f"rows k..k+8 match the golden table (k={k})")

    resets = [r for r in range(1, 50) if bit(r, sim.reset)]
    result.check(resets == [21, 44], f"reset flag fires once per cycle ({resets})")

    lonely = KripkeModel(n=1, edges=frozenset(), valuation={},
                         props=PropositionSet(distinguished=("p1", "p2", "p3")))
    tl = run(program, lonely, 50)
    flags_stay_false = all(
        not tl.configs[r][0][idx[f"N{i}"]]
        for r in range(51) for i in (1, 2, 3)
    )
    result.check(flags_stay_false, "no neighbours: N flags stay false for two cycles")
    return result


# ---------------------------------------------------------------------------
# 4. Translation equivalences
# ---------------------------------------------------------------------------

def _models_for(seed: int, count: int, delta: int, id_bits: int, pi0: int = 1):
    sizes = [3, 4, 5]
    return [
        random_kripke(sizes[i % len(sizes)], pi0, delta, seed + i, id_bits=id_bits)
        for i in range(count)
    ]


@_timed
def suite_cmsc_msc(seed: int = 0, cases: int | None = None) -> SuiteResult:
    result = SuiteResult("cmsc-msc")
    report = CheckReport(kind="strong")
    for idx in range(cases or 50):
        p = random_program("cmsc", seed * 100 + idx, heads=3, pi0=1,
                           id_bits=3, max_depth=2)
        q, _ = comp.cmsc_to_msc(p)
        sub = check_equivalence(p, q, EquivalenceSpec("strong", 64),
                                _models_for(seed * 90 + idx, 1, 2, 3))
        report.cases += sub.cases
        report.failures.extend(sub.failures)
    result.absorb(report, "cmsc_to_msc strong equivalence")
    return result


@_timed
def suite_mpmsc_mpc(seed: int = 0, cases: int | None = None) -> SuiteResult:
    result = SuiteResult("mpmsc-mpc")
    props = PropositionSet(ordinary=("q1",), distinguished=("p1", "p2", "p3"))
    report = CheckReport(kind="strong")
    for idx in range(cases or 30):
        p = random_program("mpmsc", seed * 100 + idx, heads=3, pi0=1,
                           id_bits=3, max_index=2)
        mpc, _ = comp.mpmsc_to_mpc(p, 2, props)
        sub = check_equivalence(p, mpc, EquivalenceSpec("strong", 64),
                                _models_for(seed * 91 + idx, 1, 2, 3))
        report.cases += sub.cases
        report.failures.extend(sub.failures)
    result.absorb(report, "mpmsc_to_mpc strong equivalence")
    return result


@_timed
def suite_mpc_mpmsc(seed: int = 0, cases: int | None = None) -> SuiteResult:
    result = SuiteResult("mpc-mpmsc")
    report = CheckReport(kind="strong_communication")
    for idx in range(cases or 30):
        delta = 1 + idx % 2
        mpc = random_mpc(seed * 100 + idx, k=2 + idx % 2, delta=delta,
                         pi0=1, id_bits=3, depth=1 + idx % 3)
        prog, _ = comp.mpc_to_mpmsc(mpc)
        sub = check_equivalence(mpc, prog, EquivalenceSpec("strong_communication", 8),
                                _models_for(seed * 92 + idx, 1, delta, 3))
        report.cases += sub.cases
        report.failures.extend(sub.failures)
    result.absorb(report, "mpc_to_mpmsc strong communication equivalence")
    return result


@_timed
def suite_term_zero(seed: int = 0, cases: int | None = None) -> SuiteResult:
    result = SuiteResult("term-zero")
    report = CheckReport(kind="strong")
    shift_ok = True
    for idx in range(cases or 30):
        p = random_program("msc", seed * 100 + idx, heads=3, pi0=1,
                           id_bits=3, max_depth=2)
        q, rep = comp.terminal_depth_zero(p)
        sub = check_equivalence(p, q, EquivalenceSpec("strong", 8, rep.round_mapping),
                                _models_for(seed * 93 + idx, 1, 2, 3))
        report.cases += sub.cases
        report.failures.extend(sub.failures)
        if metrics(p).mdt > 0:
            m = _models_for(seed * 93 + idx, 1, 2, 3)[0]
            ta = run(p, m, 6)
            tb = run(q, m, 7)
            for w in m.nodes():
                ra, rb = ta.acceptance_round(w), tb.acceptance_round(w)
                if (ra is None) != (rb is None) or (ra is not None and rb != ra + 1):
                    shift_ok = False
    result.absorb(report, "terminal_depth_zero shift-mapped strong equivalence")
    result.check(shift_ok, "acceptance round shifts by exactly one")
    return result


@_timed
def suite_msc1(seed: int = 0, cases: int | None = None) -> SuiteResult:
    result = SuiteResult("msc1")
    report = CheckReport(kind="strong")
    form_ok = True
    for idx in range(cases or 30):
        p = random_program("msc", seed * 100 + idx, heads=2 + idx % 2, pi0=1,
                           id_bits=3, max_depth=3)
        q, rep = comp.to_msc1(p)
        mm = metrics(q)
        if mm.mdt != 0 or mm.mdi > 1:
            form_ok = False
        sub = check_equivalence(p, q, EquivalenceSpec("strong", 8, rep.round_mapping),
                                _models_for(seed * 94 + idx, 1, 2, 3))
        report.cases += sub.cases
        report.failures.extend(sub.failures)
    result.check(form_ok, "every output satisfies the MSC[1] shape")
    result.absorb(report, "to_msc1 dilation-mapped strong equivalence")
    return result


@_timed
def suite_elim_diamonds(seed: int = 0, cases: int | None = None) -> SuiteResult:
    result = SuiteResult("elim-diamonds")
    report = CheckReport(kind="acceptance")
    for idx in range(cases or 30):
        id_bits = 2 + idx % 2
        p = random_program("mpmsc", seed * 100 + idx, heads=3, pi0=1,
                           id_bits=id_bits, max_index=2)
        q, rep = comp.eliminate_indexed_diamonds(
            p, tuple(f"p{i}" for i in range(1, id_bits + 1)))
        cycle = 3 * 2 ** id_bits - 1
        models = [random_kripke(4, 1, 2, seed * 95 + idx, id_bits=id_bits)]
        sub = check_equivalence(p, q, EquivalenceSpec("acceptance", 5, rep.round_mapping),
                                models, cycle_hint=cycle + 2)
        report.cases += sub.cases
        report.failures.extend(sub.failures)
        sub2 = check_equivalence(p, q, EquivalenceSpec("strong", 5, rep.round_mapping),
                                 models, cycle_hint=cycle + 2)
        report.failures.extend(sub2.failures)
    result.absorb(report, "eliminate_indexed_diamonds dilation-mapped equivalence")
    return result


@_timed
def suite_msc_mpc(seed: int = 0, cases: int | None = None) -> SuiteResult:
    result = SuiteResult("msc-mpc")
    props = PropositionSet(ordinary=("q1",), distinguished=("p1", "p2", "p3"))
    report = CheckReport(kind="acceptance")
    for idx in range(cases or 30):
        p = random_program("msc", seed * 100 + idx, heads=2, pi0=1,
                           id_bits=3, max_depth=2)
        mpc, rep = comp.msc_to_mpc(p, 2, props)
        sub = check_equivalence(p, mpc, EquivalenceSpec("acceptance", 8, rep.round_mapping),
                                _models_for(seed * 96 + idx, 1, 2, 3))
        report.cases += sub.cases
        report.failures.extend(sub.failures)
    result.absorb(report, "msc_to_mpc acceptance equivalence")
    return result


@_timed
def suite_mpc_msc(seed: int = 0, cases: int | None = None) -> SuiteResult:
    result = SuiteResult("mpc-msc")
    report = CheckReport(kind="acceptance")
    for idx in range(cases or 30):
        delta = 1 + idx % 2
        mpc = random_mpc(seed * 100 + idx, k=2, delta=delta, pi0=1,
                         id_bits=2, depth=1 + idx % 2)
        prog, rep = comp.mpc_to_msc(mpc)
        cycle = 3 * 2 ** 2 - 1
        sub = check_equivalence(mpc, prog, EquivalenceSpec("acceptance", 4, rep.round_mapping),
                                [random_kripke(4, 1, delta, seed * 97 + idx, id_bits=2)],
                                cycle_hint=cycle + 2)
        report.cases += sub.cases
        report.failures.extend(sub.failures)
    result.absorb(report, "mpc_to_msc acceptance equivalence (composed)")
    return result


@_timed
def suite_roundtrip(seed: int = 0, cases: int | None = None) -> SuiteResult:
    """msc_to_mpc(mpc_to_msc(C)) stays acceptance-equivalent to C."""
    result = SuiteResult("roundtrip")
    report = CheckReport(kind="acceptance")
    for idx in range(cases or 6):
        mpc = random_mpc(seed * 100 + idx, k=2, delta=1, pi0=1, id_bits=2, depth=1)
        prog, rep1 = comp.mpc_to_msc(mpc)
        mpc2, rep2 = comp.msc_to_mpc(prog, 1, mpc.props)
        # The composed dilation runs through two intermediate artifacts, so
        # compare outputs with a generous flat budget on the target side.
        sub = check_equivalence(mpc, mpc2,
                                EquivalenceSpec("acceptance", 20, target_budget=1600),
                                [random_kripke(3, 1, 1, seed * 98 + idx, id_bits=2)])
        report.cases += sub.cases
        report.failures.extend(sub.failures)
    result.absorb(report, "mpc -> msc -> mpc round trip acceptance equivalence")
    return result


# ---------------------------------------------------------------------------
# 5. Two-circuit mux exhaustive
# ---------------------------------------------------------------------------

@_timed
def suite_combine(seed: int = 0, cases: int | None = None) -> SuiteResult:
    result = SuiteResult("combine")
    b0 = CircuitBuilder()
    in0 = [b0.input() for _ in range(3)]
    c0 = b0.build(in0, [b0.add(AND, (in0[0], in0[1])), b0.add(OR, (in0[1], in0[2]))])
    b1 = CircuitBuilder()
    in1 = [b1.input() for _ in range(5)]
    neg = b1.add(NOT, (in1[0],))
    c1 = b1.build(in1, [b1.add(AND, (neg, in1[4])), b1.add(OR, (in1[1], in1[2]))])
    combined = comp.combine_two_circuits(c0, c1)
    result.check(len(combined.input_order) == 9 and len(combined.output_order) == 3,
                 "9 inputs and 3 outputs")
    first_always_one = True
    selector_exact = True
    for bits in itertools.product([False, True], repeat=9):
        out = combined.eval(bits)
        if not out[0]:
            first_always_one = False
        want = c1.eval(bits[4:]) if bits[3] else c0.eval(bits[:3])
        if out[1:] != want:
            selector_exact = False
    result.check(first_always_one, "first output bit is constantly 1 (512 inputs)")
    result.check(selector_exact, "selector semantics exact over all 512 inputs")
    return result


# ---------------------------------------------------------------------------
# 6. Cole-Vishkin round counts
# ---------------------------------------------------------------------------

@_timed
def suite_cv_counts(seed: int = 0, cases: int | None = None) -> SuiteResult:
    result = SuiteResult("cv-counts")
    for n in (4, 8, 16):
        edges = [(i, i + 1) for i in range(1, n)]
        params = CvParams(n=n, delta=2)
        r7 = run_cv(n, edges, stage="7", delta=2)
        result.check(
            r7.comm_round_count == params.comm_rounds_cv7(),
            f"cv7 n={n}: {r7.comm_round_count} global communication rounds "
            f"== log*(n)+4 = {params.comm_rounds_cv7()}")
        r3 = run_cv(n, edges, stage="3", delta=2)
        result.check(
            r3.comm_round_count == params.comm_rounds_cv3(),
            f"cv3 n={n}: {r3.comm_round_count} == log*(n)+12 = {params.comm_rounds_cv3()}")
        rf = run_cv(n, edges, stage="final", delta=2)
        result.check(
            rf.comm_round_count == params.comm_rounds_full(),
            f"full n={n}: {rf.comm_round_count} == log*(n)+3^D-D+11 = "
            f"{params.comm_rounds_full()}")
    return result


# ---------------------------------------------------------------------------
# 7. Cole-Vishkin coloring correctness
# ---------------------------------------------------------------------------

@_timed
def suite_cv_coloring(seed: int = 0, cases: int | None = None) -> SuiteResult:
    result = SuiteResult("cv-coloring")
    graphs = [(6, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)], "6-cycle")]
    count = cases or 20
    idx = 0
    while len(graphs) < count + 1:
        n = 4 + (seed * 13 + idx * 7) % 13
        edges = random_simple_graph(n, 2, seed * 50 + idx)
        idx += 1
        if edges:
            graphs.append((n, edges, f"random{len(graphs)}"))
    failures = []
    orient_failures = []
    for n, edges, tag in graphs:
        rf = run_cv(n, edges, stage="final", delta=2)
        verdict = check_coloring(rf.result, n, edges, 3)
        if not verdict["passed"]:
            failures.append((tag, verdict))
        oracle = direct_cv_oracle(n, edges, delta=2)
        degree = {v: 0 for v in range(1, n + 1)}
        for (u, v) in edges:
            degree[u] += 1
            degree[v] += 1
        prog_orient = rf.orientation_of_program()
        for v in range(1, n + 1):
            for d in range(1, degree[v] + 1):
                if prog_orient[v][d - 1] != oracle.orientation[v][d - 1]:
                    orient_failures.append((tag, v, d))
    result.check(not failures,
                 f"one-hot, palette and properness on {len(graphs)} graphs"
                 + (f"; failures: {failures[:2]}" if failures else ""))
    result.check(not orient_failures,
                 "phase-1 HIGH/LOW orientation matches the direct oracle node-for-node"
                 + (f"; first: {orient_failures[:3]}" if orient_failures else ""))
    return result


# ---------------------------------------------------------------------------
# 8. Size scaling
# ---------------------------------------------------------------------------

SCALING_BOUNDS = {
    "cmsc_to_msc": 4.0,
    "to_msc1": 14.0,
    "mpc_to_mpmsc": 12.0,
    "mpmsc_to_mpc": 12.0,
    "cv7_heads": 10.0,
}


@_timed
def suite_size_scaling(seed: int = 0, cases: int | None = None) -> SuiteResult:
    result = SuiteResult("size-scaling")
    count = cases or 40

    pairs = []
    for idx in range(count):
        p = random_program("cmsc", seed * 100 + idx, heads=2 + idx % 4,
                           pi0=1 + idx % 2, id_bits=2, max_depth=2 + idx % 2)
        q, _ = comp.cmsc_to_msc(p)
        pairs.append((metrics(p).size, metrics(q).size))
    rep = size_scaling_report("cmsc_to_msc", pairs, SCALING_BOUNDS["cmsc_to_msc"])
    result.scaling.append(rep)
    result.check(rep.passed, rep.summary())

    pairs = []
    for idx in range(count):
        p = random_program("msc", seed * 101 + idx, heads=2 + idx % 3,
                           pi0=1, id_bits=2, max_depth=3)
        q, _ = comp.to_msc1(p)
        pairs.append((metrics(p).size, metrics(q).size))
    rep = size_scaling_report("to_msc1", pairs, SCALING_BOUNDS["to_msc1"])
    result.scaling.append(rep)
    result.check(rep.passed, rep.summary())

    pairs = []
    for idx in range(count):
        mpc = random_mpc(seed * 102 + idx, k=2 + idx % 3, delta=1 + idx % 2,
                         pi0=1, id_bits=2, depth=1 + idx % 4)
        prog, _ = comp.mpc_to_mpmsc(mpc)
        pairs.append((mpc.circuit.size, metrics(prog).size))
    rep = size_scaling_report("mpc_to_mpmsc", pairs, SCALING_BOUNDS["mpc_to_mpmsc"])
    result.scaling.append(rep)
    result.check(rep.passed, rep.summary())

    pairs = []
    props = PropositionSet(ordinary=("q1",), distinguished=("p1", "p2"))
    for idx in range(count):
        delta = 1 + idx % 2
        p = random_program("mpmsc", seed * 103 + idx, heads=2 + idx % 4,
                           pi0=1, id_bits=2, max_index=delta)
        mpc, _ = comp.mpmsc_to_mpc(p, delta, props)
        pairs.append((delta * metrics(p).size + len(props.all), mpc.circuit.size))
    rep = size_scaling_report("mpmsc_to_mpc", pairs, SCALING_BOUNDS["mpmsc_to_mpc"])
    result.scaling.append(rep)
    result.check(rep.passed, rep.summary())

    pairs = []
    for n in (4, 8, 16, 32, 64):
        params = CvParams(n=n, delta=2)
        heads = cv_head_count(generate_cv7(params))
        pairs.append((2 * params.ell, heads))
    rep = size_scaling_report("cv7_heads", pairs, SCALING_BOUNDS["cv7_heads"])
    result.scaling.append(rep)
    result.check(rep.passed, rep.summary() + " (vs delta*log n)")
    return result


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

SUITES = {
    "semantics": suite_semantics,
    "clock": suite_clock,
    "diamond": suite_diamond,
    "cmsc-msc": suite_cmsc_msc,
    "mpmsc-mpc": suite_mpmsc_mpc,
    "mpc-mpmsc": suite_mpc_mpmsc,
    "term-zero": suite_term_zero,
    "msc1": suite_msc1,
    "elim-diamonds": suite_elim_diamonds,
    "msc-mpc": suite_msc_mpc,
    "mpc-msc": suite_mpc_msc,
    "roundtrip": suite_roundtrip,
    "combine": suite_combine,
    "cv-counts": suite_cv_counts,
    "cv-coloring": suite_cv_coloring,
    "size-scaling": suite_size_scaling,
}


def run_suite(name: str, seed: int = 0, cases: int | None = None) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](seed, cases)


def run_all(seed: int = 0) -> list[SuiteResult]:
    return [run_suite(name, seed) for name in SUITES]

"""Cole-Vishkin coloring: MPMSC program generators plus a direct oracle.

The generated programs follow the staged construction: forest decomposition
by ID comparison, per-forest Cole-Vishkin color shrinking driven by a
minute/second-hand clock, the shift-down reduction to 3 colors per forest,
and the final greedy reduction to delta+1 colors.  ``direct_cv_oracle`` runs
the same algorithm directly on the graph and is used to cross-check the
programs' orientation phase and outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .compile import build_clock
from .eval import Trace, run
from .model import KripkeModel, bit_length, graph_to_kripke
from .syntax import (
    And, DiamondI, IterationClause, Not, Program, Prop, Schema, TOP, Var,
    big_and, big_or, bot, iff, make_program,
)


class ColoringError(Exception):
    pass


class NotSimpleGraphError(ColoringError):
    pass


class MissingOutput(ColoringError):
    def __init__(self, node):
        super().__init__(f"node {node} produced no output")
        self.node = node


def log_star(n: int) -> int:
    """Iterations of the bit-length map log(k) = floor(log2 k) + 1 needed to
    bring log(n) down to at most 3.  (The shrink recurrence with the extra
    +1 stalls at 4, so the bare bit-length map is iterated instead; round
    count assertions all use this convention.)"""
    x = bit_length(n)
    t = 0
    while x > 3:
        x = bit_length(x)
        t += 1
    return t


@dataclass(frozen=True)
class CvParams:
    """Problem dimensions and the derived clock/counter lengths."""

    n: int
    delta: int

    def __post_init__(self):
        if self.n < 2:
            raise ColoringError("need n >= 2")
        if self.delta < 1:
            raise ColoringError("need delta >= 1")

    @property
    def ell(self) -> int:
        return bit_length(self.n)

    @property
    def clock_len(self) -> int:
        return bit_length(self.ell)

    @property
    def reg_width(self) -> int:
        """Width of the per-forest color registers.  CV colors of ell-bit
        IDs stay within max(ell, 3) bits (one step maps length k to at most
        1 + log(k), and 3-bit colors are a fixed point), and ell = 2 needs
        the extra bit immediately."""
        return max(self.ell, 3)

    @property
    def hours(self) -> int:
        """L: clock cycles spent on CV proper."""
        return log_star(self.n) + 3

    @property
    def loop_count(self) -> int:
        """t: loop counters of the basic color reduction (t-1 loops run)."""
        return 3 ** self.delta - self.delta

    @property
    def cycle(self) -> int:
        """Rounds per full minute-hand cycle of the phase-2 clock."""
        return 3 * 2 ** self.clock_len - 1

    def id_props(self) -> tuple[str, ...]:
        return tuple(f"p{i}" for i in range(1, self.ell + 1))

    def comm_rounds_cv7(self) -> int:
        return log_star(self.n) + 4

    def comm_rounds_cv3(self) -> int:
        return log_star(self.n) + 12

    def comm_rounds_full(self) -> int:
        return log_star(self.n) + 3 ** self.delta - self.delta + 11

    def round_budget(self, stage: str) -> int:
        base = (self.ell + 2) + self.hours * self.cycle
        if stage == "7":
            return base + 10
        if stage == "3":
            return base + 24
        if stage == "final":
            return base + 24 + (self.loop_count - 1) * (3 * self.delta + 3) + 8
        raise ColoringError(f"unknown stage {stage!r}")


# ---------------------------------------------------------------------------
# Program generation
# ---------------------------------------------------------------------------

def _digit_pattern(vars_desc: list[Schema | None], value: int) -> Schema:
    """Conjunction asserting that the listed bit variables (most significant
    first) spell the given value; None stands for a bit that does not exist
    and therefore reads constant 0."""
    bits = len(vars_desc)
    lits = []
    for pos, v in enumerate(vars_desc):
        bit = (value >> (bits - 1 - pos)) & 1
        if v is None:
            if bit:
                lits.append(bot())
            continue
        lits.append(v if bit else Not(v))
    return big_and(lits)


class _CvBuilder:
    """Accumulates clauses phase by phase and assembles the Program."""

    def __init__(self, params: CvParams):
        self.p = params
        self.terminals: list[tuple[str, Schema]] = []
        self.clauses: list[IterationClause] = []

    def head(self, name: str, terminal: Schema, conditions=(), consequences=(),
             backup: Schema | None = None):
        self.terminals.append((name, terminal))
        if backup is None:
            raise ColoringError(f"clause for {name} needs a backup")
        self.clauses.append(IterationClause(
            name, tuple(conditions), tuple(consequences), backup))

    def parent(self, delta_idx: int, phi: Schema) -> Schema:
        """<delta>phi: phi holds at this node's parent in forest F_delta."""
        terms = []
        for i in range(delta_idx, self.p.delta + 1):
            conj = []
            if i - delta_idx >= 1:
                conj.append(Var(f"HIGH{i - delta_idx}"))
            conj.append(Var(f"LOW{i - delta_idx + 1}"))
            conj.append(DiamondI(i, phi))
            terms.append(big_and(conj))
        return big_or(terms)

    def _color_bits(self, d: int) -> list:
        """The three CV color bits of forest d, most significant first;
        positions beyond the ID length do not exist and read 0."""
        return [
            Var(f"B{d}_{j}") if j <= self.p.reg_width else None
            for j in (3, 2, 1)
        ]

    # ---- phase 1: forest decomposition -----------------------------------

    def phase1(self):
        p = self.p
        ell = p.ell
        for i in range(1, ell + 3):
            self.head(f"T{i}", bot(), (), (),
                      TOP if i == 1 else Var(f"T{i - 1}"))
        halt = Var(f"T{ell + 1}")
        tick = Var("T1")
        for i in range(1, ell + 1):
            rot = Var(f"I{i - 1}") if i > 1 else Var(f"I{ell}")
            self.head(f"I{i}", Prop(f"p{i}"),
                      (halt, tick), (Var(f"I{i}"), rot), Var(f"I{i}"))
        for d in range(1, p.delta + 1):
            for i in range(1, ell + 1):
                rot = Var(f"I{i - 1}n{d}") if i > 1 else Var(f"I{ell}n{d}")
                self.head(f"I{i}n{d}", bot(),
                          (halt, tick), (Var(f"I{i}n{d}"), rot),
                          DiamondI(d, Var(f"I{i}")))
        # DIF is shared with phase 2: reset on CR, color bits after END1,
        # ID bits during phase 1, and blank in the very first round.
        end1 = Var(f"T{ell + 2}")
        for d in range(1, p.delta + 1):
            self.head(f"DIF{d}", bot(),
                      (Var("CR"), end1, tick),
                      (bot(),
                       Not(iff(Var(f"B{d}_1"), Var(f"P{d}_1"))),
                       Not(iff(Var(f"I{ell}"), Var(f"I{ell}n{d}")))),
                      bot())
        for d in range(1, p.delta + 1):
            self.head(f"HIGH{d}", bot(),
                      (Var(f"HIGH{d}"), Var(f"LOW{d}"), Var(f"DIF{d}")),
                      (TOP, bot(), Var("I1")), bot())
            self.head(f"LOW{d}", bot(),
                      (Var(f"LOW{d}"), Var(f"HIGH{d}"), Var(f"DIF{d}")),
                      (TOP, bot(), Not(Var("I1"))), bot())

    # ---- phase 2: per-forest Cole-Vishkin ---------------------------------

    def phase2(self, with_clr: bool):
        p = self.p
        ell = p.ell
        end1 = Var(f"T{ell + 2}")
        frag = build_clock(p.clock_len, 0)
        for (name, term), clause in zip(frag.terminals, frag.clauses):
            if name == frag.changing:
                term = TOP
            # Clock variables keep their terminal values until phase 2
            # starts and freeze for good when the hour hand stops them.
            self.head(name, term,
                      (Not(end1), Var("STOP")) + clause.conditions,
                      (Var(name), Var(name)) + clause.consequences,
                      clause.backup)
        s_on = Var(frag.changing)
        s_off = Not(Var(frag.changing))
        minutes_zero = big_and([Not(Var(m)) for m in frag.minute])
        self.head("CR", bot(), (end1,), (And(minutes_zero, s_on),), bot())

        width = p.reg_width
        for d in range(1, p.delta + 1):
            for i in range(1, width + 1):
                nxt = i + 1 if i < width else 1
                self.head(f"B{d}_{i}", Prop(f"p{i}") if i <= ell else bot(),
                          (Var("END2"), Var("CR"), s_off),
                          (Var(f"B{d}_{i}"), Var(f"N{d}_{i}"), Var(f"B{d}_{nxt}")),
                          Var(f"B{d}_{i}"))
        for d in range(1, p.delta + 1):
            for i in range(1, width + 1):
                nxt = i + 1 if i < width else 1
                self.head(f"P{d}_{i}", bot(),
                          (Var("STOP"), Var("CR"), s_off),
                          (Var(f"P{d}_{i}"),
                           self.parent(d, Var(f"N{d}_{i}")),
                           Var(f"P{d}_{nxt}")),
                          Var(f"P{d}_{i}"))
        for d in range(1, p.delta + 1):
            self.head(f"GET{d}", bot(),
                      (Var("CR"), Var(f"GET{d}")),
                      (bot(), TOP), Var(f"DIF{d}"))
        for d in range(1, p.delta + 1):
            for i in range(1, width + 1):
                if i == 1:
                    captured = Var(f"B{d}_1")
                elif i - 1 <= p.clock_len:
                    captured = Var(frag.minute[i - 2])
                else:
                    captured = bot()
                default = Prop(f"p{i}") if i <= ell else bot()
                self.head(f"N{d}_{i}", default,
                          (Not(end1), Var("END2"), Var(f"GET{d}"), Var(f"DIF{d}")),
                          (Var(f"N{d}_{i}"), Var(f"N{d}_{i}"),
                           Var(f"N{d}_{i}"), captured),
                          default)
        hours = p.hours
        for i in range(1, hours + 1):
            trigger = Var("CR") if i == 1 else And(Var(f"H{i - 1}"), Var("CR"))
            self.head(f"H{i}", bot(),
                      (big_or([Var(f"H{i}"), trigger]),), (TOP,), bot())
        self.head("STOP", bot(), (Var("STOP"),), (TOP,),
                  And(Var(f"H{hours}"), And(minutes_zero, s_on)))
        self.head("END2", bot(), (Var("END2"),), (TOP,), Var("STOP"))

        if with_clr:
            for value in range(8 ** p.delta):
                digits = [(value // (8 ** (d - 1))) % 8 for d in range(1, p.delta + 1)]
                if any(dig == 0 for dig in digits):
                    continue
                pattern = big_and([
                    _digit_pattern(self._color_bits(d), digits[d - 1])
                    for d in range(1, p.delta + 1)
                ])
                self.head(f"CLR{value}", bot(), (Var("END2"),), (pattern,), bot())

    # ---- phase 3: shift-down ----------------------------------------------

    def phase3(self, with_clr: bool):
        p = self.p
        end3 = Var("Tp4")
        self.head("Z1", bot(),
                  (end3, big_or([Var("Z1"), Var("Z2")]), Var("END2")),
                  (Var("Z1"), bot(), TOP), bot())
        self.head("Z2", bot(), (end3, Var("Z1")), (Var("Z2"), TOP), bot())
        self.head("Z3", bot(), (end3, Var("Z2")), (Var("Z3"), TOP), bot())
        for i in range(1, 5):
            trigger = Var("Z3") if i == 1 else And(Var(f"Tp{i - 1}"), Var("Z3"))
            self.head(f"Tp{i}", bot(),
                      (big_or([Var(f"Tp{i}"), trigger]),), (TOP,), bot())
        for d in range(1, p.delta + 1):
            for i in range(1, 8):
                self.head(f"Cc{d}_{i}", bot(),
                          (end3, Var("Z1")),
                          (Var(f"Cc{d}_{i}"), Var(f"C{d}_{i}")),
                          Var(f"Cc{d}_{i}"))
        for d in range(1, p.delta + 1):
            for i in range(1, 8):
                self.head(f"Cp{d}_{i}", bot(),
                          (end3, Var("Z2")),
                          (Var(f"Cp{d}_{i}"), self.parent(d, Var(f"C{d}_{i}"))),
                          Var(f"Cp{d}_{i}"))
        for d in range(1, p.delta + 1):
            self.head(f"R{d}", bot(),
                      (Var("STOP"), Var(f"R{d}"), Var("CR")),
                      (Var(f"R{d}"), TOP, Not(self.parent(d, TOP))), bot())

        def greatest(d: int) -> Schema:
            cases = []
            for i in range(3, 8):
                higher = big_or([
                    big_or([Var(f"Cc{d}_{j}"), Var(f"Cp{d}_{j}")])
                    for j in range(i + 1, 8)
                ])
                cases.append(And(Var(f"C{d}_{i}"), Not(higher)))
            return And(Var("Z3"), big_or(cases))

        def lowest(d: int, i: int) -> Schema:
            if i == 1:
                return Not(big_or([Var(f"Cc{d}_1"), Var(f"Cp{d}_1")]))
            if i == 2:
                return And(Not(lowest(d, 1)),
                           Not(big_or([Var(f"Cc{d}_2"), Var(f"Cp{d}_2")])))
            return And(Not(lowest(d, 1)), Not(lowest(d, 2)))

        for d in range(1, p.delta + 1):
            for i in range(1, 8):
                bits = _digit_pattern(self._color_bits(d), i)
                conds = [end3, greatest(d), big_or([Var("Z3"), Var("Z2")])]
                conss = [Var(f"C{d}_{i}"),
                         lowest(d, i) if i <= 3 else bot(),
                         Var(f"C{d}_{i}")]
                if i == 1:
                    conds.append(And(Var(f"R{d}"), Var("Z1")))
                    conss.append(Not(Var(f"C{d}_1")))
                elif i == 2:
                    conds.append(And(Var(f"R{d}"), Var("Z1")))
                    conss.append(Var(f"C{d}_1"))
                conds += [Var("Z1"), Var("END2")]
                conss += [self.parent(d, Var(f"C{d}_{i}")), bits]
                self.head(f"C{d}_{i}", bot(), conds, conss, bot())

        if with_clr:
            for value in range(4 ** p.delta):
                digits = [(value // (4 ** (d - 1))) % 4 for d in range(1, p.delta + 1)]
                if any(dig == 0 for dig in digits):
                    continue
                pattern = big_and([
                    big_and([
                        Var(f"C{d}_{j}") if j == digits[d - 1] else Not(Var(f"C{d}_{j}"))
                        for j in (3, 2, 1)
                    ])
                    for d in range(1, p.delta + 1)
                ])
                self.head(f"CLR{value}", bot(), (end3,), (pattern,), bot())

    # ---- phase 4: basic color reduction -----------------------------------

    def phase4(self):
        p = self.p
        width = 2 * p.delta
        ellp = bit_length(p.delta + 1)
        end3 = Var("Tp4")
        t = p.loop_count
        end4 = Var(f"LP{t}")

        def init_bit(i: int) -> Schema:
            forest = (i + 1) // 2
            low = i - 2 * forest + 2
            return big_or([Var(f"C{forest}_{low}"), Var(f"C{forest}_3")])

        def change_bit(i: int) -> Schema:
            if i > ellp:
                return bot()
            picks = [
                Var(f"LL{c}") for c in range(1, p.delta + 2) if (c >> (i - 1)) & 1
            ]
            return big_or(picks)

        for i in range(1, width + 1):
            prev = i - 1 if i > 1 else width
            self.head(f"BB{i}", bot(),
                      (end4, Var("GG"), Var("T2_1"), Var("T1_1"), end3),
                      (Var(f"BB{i}"), change_bit(i), Var(f"BB{i}"),
                       Var(f"BB{prev}"), init_bit(i)),
                      bot())
        for i in range(1, width + 1):
            self.head(f"T1_{i}", bot(),
                      (end4, Var("CRp"), Var("T1_1") if i == 1 else Var(f"T1_{i - 1}")),
                      (Var(f"T1_{i}"), TOP if i == 1 else bot(), TOP),
                      bot())
        for i in range(1, p.delta + 2):
            prev = Var(f"T1_{width}") if i == 1 else Var(f"T2_{i - 1}")
            self.head(f"T2_{i}", bot(),
                      (end4, Var("CRp"), prev),
                      (Var(f"T2_{i}"), bot(), TOP), bot())
        for i in range(1, t + 1):
            trigger = Var("CRp") if i == 1 else Var("CC")
            cons = TOP if i == 1 else Var(f"LP{i - 1}")
            self.head(f"LP{i}", bot(),
                      (Var(f"LP{i}"), trigger), (TOP, cons), bot())
        self.head("CC", bot(),
                  (end4, big_or([Var("CRp"), Var("CC")]), Var(f"T2_{p.delta + 1}")),
                  (Var("CC"), bot(), TOP), bot())
        self.head("CRp", bot(),
                  (end4, Var("CC"), big_or([Var("CRp"), Var("T1_1")]), end3),
                  (Var("CRp"), TOP, bot(), TOP), bot())
        for d in range(1, p.delta + 1):
            for i in range(1, width + 1):
                prev = i - 1 if i > 1 else width
                self.head(f"BN{d}_{i}", bot(),
                          (end4, Var("CRp"), Var("T2_1"), Var("T1_1")),
                          (Var(f"BN{d}_{i}"), DiamondI(d, Var(f"BB{i}")),
                           Var(f"BN{d}_{i}"), Var(f"BN{d}_{prev}")),
                          bot())
        for d in range(1, p.delta + 1):
            self.head(f"DIFp{d}", bot(),
                      (end4, Var("CRp"), Var("T1_1")),
                      (Var(f"DIFp{d}"), bot(),
                       Not(iff(Var(f"BB{width}"), Var(f"BN{d}_{width}")))),
                      bot())
        for d in range(1, p.delta + 1):
            self.head(f"HIGHp{d}", bot(),
                      (end4, Var("CRp"), Var(f"HIGHp{d}"), Var(f"LOWp{d}"), Var(f"DIFp{d}")),
                      (Var(f"HIGHp{d}"), bot(), TOP, bot(), Var("BB1")),
                      bot())
            self.head(f"LOWp{d}", bot(),
                      (end4, Var("CRp"), Var(f"LOWp{d}"), Var(f"HIGHp{d}"), Var(f"DIFp{d}")),
                      (Var(f"LOWp{d}"), bot(), TOP, bot(), Not(Var("BB1"))),
                      bot())
        # Resetting on CR' as well (like CC itself) stops a stale second pulse
        # one round into the next loop, which would make ex-maximal nodes redo
        # the change and skip a rotation.
        self.head("GG", bot(),
                  (end4, big_or([Var("CRp"), Var("CC")]), Var(f"T2_{p.delta + 1}")),
                  (Var("GG"), bot(),
                   big_and([Var(f"HIGHp{d}") for d in range(1, p.delta + 1)])),
                  bot())

        def color_pattern(d: int, c: int) -> Schema:
            lits = []
            for j in range(ellp, 0, -1):
                v = Var(f"BN{d}_{j}")
                lits.append(v if (c >> (j - 1)) & 1 else Not(v))
            return big_and(lits)

        for c in range(1, p.delta + 2):
            taken = big_and([
                Not(color_pattern(d, c)) for d in range(1, p.delta + 1)
            ])
            body = And(taken, big_and([Not(Var(f"LL{j}")) for j in range(1, c)])) \
                if c > 1 else taken
            self.head(f"LL{c}", bot(),
                      (end4, Var(f"T2_{c}")),
                      (Var(f"LL{c}"), body), bot())

        for c in range(1, p.delta + 2):
            lits = []
            for j in range(ellp, 0, -1):
                v = Var(f"BB{j}")
                lits.append(v if (c >> (j - 1)) & 1 else Not(v))
            self.head(f"CLR{c}", bot(), (end4,), (big_and(lits),), bot())

    def build(self, clr_prefix: str = "CLR") -> Program:
        heads = [h for h, _ in self.terminals]
        appointed = {h for h in heads if h.startswith(clr_prefix)}
        return make_program(
            "mpmsc", self.terminals, self.clauses,
            attention=appointed, prints=appointed,
        )


def appointed_counts(stage: str, delta: int) -> dict:
    """Raw (before pruning impossible colors) and emitted appointed heads."""
    if stage == "7":
        return {"raw": 8 ** delta, "emitted": 7 ** delta}
    if stage == "3":
        return {"raw": 4 ** delta, "emitted": 3 ** delta}
    if stage == "final":
        return {"raw": delta + 1, "emitted": delta + 1}
    raise ColoringError(f"unknown stage {stage!r}")


def _check_delta_cap(params: CvParams, allow_large_delta: bool):
    # 7^delta appointed heads explode quickly; keep desk-scale runs honest.
    if params.delta > 4 and not allow_large_delta:
        raise ColoringError(
            f"delta {params.delta} > 4 generates {7 ** params.delta} appointed "
            "heads; pass allow_large_delta=True to override")


def generate_cv7(params: CvParams, allow_large_delta: bool = False) -> Program:
    """The 7^delta-coloring stage: forest decomposition plus per-forest CV."""
    _check_delta_cap(params, allow_large_delta)
    b = _CvBuilder(params)
    b.phase1()
    b.phase2(with_clr=True)
    return b.build()


def generate_cv3(params: CvParams, allow_large_delta: bool = False) -> Program:
    """Through shift-down: a 3^delta-coloring."""
    _check_delta_cap(params, allow_large_delta)
    b = _CvBuilder(params)
    b.phase1()
    b.phase2(with_clr=False)
    b.phase3(with_clr=True)
    return b.build()


def generate_cv_full(params: CvParams, allow_large_delta: bool = False) -> Program:
    """The full (delta+1)-coloring program."""
    _check_delta_cap(params, allow_large_delta)
    b = _CvBuilder(params)
    b.phase1()
    b.phase2(with_clr=False)
    b.phase3(with_clr=False)
    b.phase4()
    return b.build()


def generate_cv(params: CvParams, stage: str, allow_large_delta: bool = False) -> Program:
    if stage == "7":
        return generate_cv7(params, allow_large_delta)
    if stage == "3":
        return generate_cv3(params, allow_large_delta)
    if stage == "final":
        return generate_cv_full(params, allow_large_delta)
    raise ColoringError(f"unknown stage {stage!r}")


def cv_head_count(p: Program) -> int:
    """Heads excluding the appointed color predicates."""
    return sum(1 for h in p.head_order if not h.startswith("CLR"))


# ---------------------------------------------------------------------------
# Direct algorithmic oracle
# ---------------------------------------------------------------------------

def _check_simple(n: int, edges) -> list[tuple[int, int]]:
    seen = set()
    for (u, v) in edges:
        if not (1 <= u <= n and 1 <= v <= n):
            raise NotSimpleGraphError(f"edge ({u}, {v}) out of range")
        if u == v:
            raise NotSimpleGraphError(f"self-loop at {u}")
        seen.add((min(u, v), max(u, v)))
    return sorted(seen)


def cv_step(color: int, parent_color: int) -> int:
    """One Cole-Vishkin rewrite: (bit at first differing position, position)."""
    if color == parent_color:
        raise ColoringError("CV step needs distinct colors")
    diff = color ^ parent_color
    pos = (diff & -diff).bit_length()  # 1-based index of rightmost difference
    bit = (color >> (pos - 1)) & 1
    return bit + 2 * pos


@dataclass
class OracleResult:
    colors: dict[int, int]
    comm_rounds: int
    orientation: dict[int, list[str]]
    parents: dict[int, dict[int, int | None]]
    forest_colors: dict[int, dict[int, int]]

    def color_bits(self, node: int, width: int) -> str:
        return format(self.colors[node], f"0{width}b")


def direct_cv_oracle(n: int, edges, delta: int | None = None) -> OracleResult:
    """Straight implementation of the coloring algorithm on ids 1..n.

    Orientation by ID, forests by ascending-ID edge labels, ``hours`` CV
    rewrites per forest (roots compare against color 0), four shift-down
    loops, then greedy reduction until every color is at most delta+1.
    """
    simple = _check_simple(n, edges)
    adj: dict[int, set[int]] = {v: set() for v in range(1, n + 1)}
    for (u, v) in simple:
        adj[u].add(v)
        adj[v].add(u)
    max_degree = max((len(a) for a in adj.values()), default=0)
    if delta is None:
        delta = max(1, max_degree)
    if max_degree > delta:
        raise ColoringError(f"graph degree {max_degree} exceeds delta {delta}")
    params = CvParams(n=max(n, 2), delta=delta)

    # Orientation: neighbours in ascending ID order; HIGH = my id is larger.
    orientation: dict[int, list[str]] = {}
    parents: dict[int, dict[int, int | None]] = {}
    for v in range(1, n + 1):
        ordered = sorted(adj[v])
        orientation[v] = ["HIGH" if v > u else "LOW" for u in ordered]
        higher = [u for u in ordered if u > v]
        parents[v] = {
            d: (higher[d - 1] if d - 1 < len(higher) else None)
            for d in range(1, delta + 1)
        }
    comm = 1  # one round to exchange IDs for the comparisons

    # Per-forest Cole-Vishkin for `hours` rounds.
    colors = {v: {d: v for d in range(1, delta + 1)} for v in range(1, n + 1)}
    for _ in range(params.hours):
        nxt = {}
        for v in range(1, n + 1):
            nxt[v] = {}
            for d in range(1, delta + 1):
                parent = parents[v][d]
                pcol = colors[parent][d] if parent is not None else 0
                nxt[v][d] = cv_step(colors[v][d], pcol)
        colors = nxt
        comm += 1

    # Shift-down: 4 loops of inherit / fetch parent / reduce local maxima.
    for _ in range(4):
        stored_child = {v: dict(colors[v]) for v in colors}
        for v in range(1, n + 1):
            for d in range(1, delta + 1):
                parent = parents[v][d]
                if parent is None:
                    colors[v][d] = 2 if stored_child[v][d] == 1 else 1
        inherited = {
            v: {
                d: (stored_child[parents[v][d]][d] if parents[v][d] is not None
                    else colors[v][d])
                for d in range(1, delta + 1)
            }
            for v in range(1, n + 1)
        }
        for v in range(1, n + 1):
            for d in range(1, delta + 1):
                if parents[v][d] is not None:
                    colors[v][d] = inherited[v][d]
        comm += 1
        stored_parent = {
            v: {
                d: (colors[parents[v][d]][d] if parents[v][d] is not None else 0)
                for d in range(1, delta + 1)
            }
            for v in range(1, n + 1)
        }
        comm += 1
        for v in range(1, n + 1):
            for d in range(1, delta + 1):
                own = colors[v][d]
                others = {stored_child[v][d], stored_parent[v][d]}
                if own >= 3 and all(own >= o for o in others):
                    colors[v][d] = min(c for c in (1, 2, 3) if c not in others)

    forest_colors = {v: dict(colors[v]) for v in colors}

    # Combine the per-forest colors as bit pairs and reduce greedily.
    combined = {
        v: sum(colors[v][d] << (2 * (d - 1)) for d in range(1, delta + 1))
        for v in range(1, n + 1)
    }
    while any(combined[v] > delta + 1 for v in combined):
        movers = [
            v for v in combined
            if all(combined[v] > combined[u] for u in adj[v])
        ]
        for v in movers:
            blocked = {combined[u] for u in adj[v]}
            combined[v] = min(
                c for c in range(1, delta + 2) if c not in blocked
            )
        comm += 1

    return OracleResult(
        colors=combined,
        comm_rounds=comm,
        orientation=orientation,
        parents=parents,
        forest_colors=forest_colors,
    )


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------

@dataclass
class ColoringResult:
    """Outputs of a coloring program plus shape/palette/properness checks."""

    outputs: dict[int, str]
    palette: int
    one_hot: bool = field(init=False)
    within_palette: bool = field(init=False)
    color_index: dict[int, int | None] = field(init=False)

    def __post_init__(self):
        self.color_index = {}
        self.one_hot = True
        self.within_palette = True
        for node, bits in self.outputs.items():
            ones = [i for i, c in enumerate(bits) if c == "1"]
            if len(ones) != 1:
                self.one_hot = False
                self.color_index[node] = None
                continue
            self.color_index[node] = ones[0]
            if ones[0] >= self.palette:
                self.within_palette = False


def check_coloring(result: ColoringResult, n: int, edges, k: int) -> dict:
    """Verify one-hot shape against palette k and properness over the edges."""
    for v in range(1, n + 1):
        if (v - 1) not in result.outputs and v not in result.outputs:
            raise MissingOutput(v)
    proper = True
    bad_edge = None
    for (u, v) in _check_simple(n, edges):
        a = result.outputs.get(u - 1, result.outputs.get(u))
        b = result.outputs.get(v - 1, result.outputs.get(v))
        if a == b:
            proper = False
            bad_edge = (u, v)
            break
    ok_shape = result.one_hot and result.within_palette and result.palette <= k
    return {
        "one_hot": result.one_hot,
        "palette_ok": result.within_palette and result.palette <= k,
        "proper": proper,
        "bad_edge": bad_edge,
        "passed": ok_shape and proper,
    }


# ---------------------------------------------------------------------------
# Running a generated program on a graph
# ---------------------------------------------------------------------------

@dataclass
class CvRun:
    params: CvParams
    program: Program
    model: KripkeModel
    trace: Trace
    result: ColoringResult
    comm_round_count: int

    def orientation_of_program(self) -> dict[int, list[str]]:
        """HIGH/LOW flags per node at the end of phase 1 (node ids 1-based)."""
        p = self.program
        round_idx = self.params.ell + 2
        out = {}
        for w in range(self.model.n):
            flags = []
            for d in range(1, self.params.delta + 1):
                high = self.trace.configs[round_idx][w][p.head_index(f"HIGH{d}")]
                low = self.trace.configs[round_idx][w][p.head_index(f"LOW{d}")]
                flags.append("HIGH" if high and not low else
                             "LOW" if low and not high else "NONE")
            out[w + 1] = flags
        return out


def run_cv(n: int, edges, stage: str = "final", delta: int | None = None,
           extra_rounds: int = 0) -> CvRun:
    simple = _check_simple(n, edges)
    degree = {v: 0 for v in range(1, n + 1)}
    for (u, v) in simple:
        degree[u] += 1
        degree[v] += 1
    max_degree = max(degree.values(), default=0)
    if delta is None:
        delta = max(1, max_degree)
    if max_degree > delta:
        raise ColoringError(f"graph degree {max_degree} exceeds delta {delta}")
    params = CvParams(n=max(n, 2), delta=delta)
    program = generate_cv(params, stage)
    model = graph_to_kripke(n, simple)
    trace = run(program, model, params.round_budget(stage) + extra_rounds)
    outputs = {}
    for w in range(model.n):
        out = trace.output(w)
        if out is None:
            raise MissingOutput(w + 1)
        outputs[w] = out
    palette = {"7": 7 ** delta, "3": 3 ** delta, "final": delta + 1}[stage]
    result = ColoringResult(outputs=outputs, palette=palette)
    return CvRun(
        params=params,
        program=program,
        model=model,
        trace=trace,
        result=result,
        comm_round_count=len(trace.comm_rounds),
    )

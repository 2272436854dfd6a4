"""Schemata, clauses and programs of MSC and its variants, plus the DSL.

Schemata are immutable ASTs over the primitive connectives T, !, &, <> and
<i>; the sugar F, |, ->, <-> desugars at construction/parse time, so sizes
and golden files always refer to the desugared form.  A name occurring in a
clause body denotes a head predicate when the program declares that head,
and a proposition symbol otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class ProgramError(Exception):
    pass


class ParseError(ProgramError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class VariantViolation(ProgramError):
    pass


VARIANTS = ("msc", "mmsc", "cmsc", "mpmsc")
RESERVED = set(VARIANTS) | {"attention", "print", "order", "T", "F"}


# ---------------------------------------------------------------------------
# Schemata
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Schema:
    pass


@dataclass(frozen=True)
class Top(Schema):
    pass


@dataclass(frozen=True)
class Prop(Schema):
    name: str


@dataclass(frozen=True)
class Var(Schema):
    name: str


@dataclass(frozen=True)
class Not(Schema):
    sub: Schema


@dataclass(frozen=True)
class And(Schema):
    left: Schema
    right: Schema


@dataclass(frozen=True)
class Diamond(Schema):
    sub: Schema


@dataclass(frozen=True)
class DiamondI(Schema):
    index: int
    sub: Schema

    def __post_init__(self):
        if self.index < 1:
            raise ProgramError(f"diamond index must be >= 1, got {self.index}")


TOP = Top()
BOT = Not(TOP)


def bot() -> Schema:
    return BOT


def or_(a: Schema, b: Schema) -> Schema:
    return Not(And(Not(a), Not(b)))


def implies(a: Schema, b: Schema) -> Schema:
    return Not(And(a, Not(b)))


def iff(a: Schema, b: Schema) -> Schema:
    return or_(And(a, b), And(Not(a), Not(b)))


def big_and(items) -> Schema:
    items = list(items)
    if not items:
        return TOP
    out = items[0]
    for s in items[1:]:
        out = And(out, s)
    return out


def big_or(items) -> Schema:
    items = list(items)
    if not items:
        return BOT
    out = items[0]
    for s in items[1:]:
        out = Not(And(Not(out), Not(s)))
    return out


def children(s: Schema) -> tuple[Schema, ...]:
    if isinstance(s, Not):
        return (s.sub,)
    if isinstance(s, And):
        return (s.left, s.right)
    if isinstance(s, (Diamond, DiamondI)):
        return (s.sub,)
    return ()


def walk(s: Schema):
    """All subschema nodes, preorder (with repetitions)."""
    stack = [s]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(children(node))


def modal_depth(s: Schema) -> int:
    if isinstance(s, (Top, Prop, Var)):
        return 0
    if isinstance(s, Not):
        return modal_depth(s.sub)
    if isinstance(s, And):
        return max(modal_depth(s.left), modal_depth(s.right))
    if isinstance(s, (Diamond, DiamondI)):
        return 1 + modal_depth(s.sub)
    raise TypeError(s)


def schema_size(s: Schema) -> int:
    """Occurrences of propositions, head predicates and T/!/&/<>/<i>."""
    return sum(1 for _ in walk(s))


def max_diamond_index(s: Schema) -> int:
    return max((n.index for n in walk(s) if isinstance(n, DiamondI)), default=0)


def has_diamond(s: Schema) -> bool:
    return any(isinstance(n, (Diamond, DiamondI)) for n in walk(s))


def has_var(s: Schema) -> bool:
    return any(isinstance(n, Var) for n in walk(s))


def var_names(s: Schema) -> set[str]:
    return {n.name for n in walk(s) if isinstance(n, Var)}


def prop_names(s: Schema) -> set[str]:
    return {n.name for n in walk(s) if isinstance(n, Prop)}


def schema_subschemata(s: Schema) -> set[Schema]:
    return set(walk(s))


def substitute_vars(s: Schema, mapping: dict[str, Schema]) -> Schema:
    """Replace each Var named in mapping by the mapped schema (simultaneous)."""
    if isinstance(s, Var):
        return mapping.get(s.name, s)
    if isinstance(s, Not):
        return Not(substitute_vars(s.sub, mapping))
    if isinstance(s, And):
        return And(substitute_vars(s.left, mapping), substitute_vars(s.right, mapping))
    if isinstance(s, Diamond):
        return Diamond(substitute_vars(s.sub, mapping))
    if isinstance(s, DiamondI):
        return DiamondI(s.index, substitute_vars(s.sub, mapping))
    return s


def rewrite(s: Schema, table: dict[Schema, Schema]) -> Schema:
    """Replace every occurrence of a table key (largest-first, structural)."""
    if s in table:
        return table[s]
    if isinstance(s, Not):
        return Not(rewrite(s.sub, table))
    if isinstance(s, And):
        return And(rewrite(s.left, table), rewrite(s.right, table))
    if isinstance(s, Diamond):
        return Diamond(rewrite(s.sub, table))
    if isinstance(s, DiamondI):
        return DiamondI(s.index, rewrite(s.sub, table))
    return s


# ---------------------------------------------------------------------------
# Clauses and programs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IterationClause:
    """An iteration rule; with no conditions this is a plain MSC clause.

    Conditions pair with consequences positionally; the first true condition
    (left to right) is hot and selects its consequence, otherwise the backup
    applies.
    """

    head: str
    conditions: tuple[Schema, ...]
    consequences: tuple[Schema, ...]
    backup: Schema

    def __post_init__(self):
        if len(self.conditions) != len(self.consequences):
            raise ProgramError(
                f"{self.head}: {len(self.conditions)} conditions but "
                f"{len(self.consequences)} consequences"
            )

    @property
    def is_conditional(self) -> bool:
        return bool(self.conditions)

    def bodies(self) -> tuple[Schema, ...]:
        """Consequences and backup (the schemata that can become the update)."""
        return self.consequences + (self.backup,)

    def all_schemata(self) -> tuple[Schema, ...]:
        return self.conditions + self.consequences + (self.backup,)


def plain(head: str, body: Schema) -> IterationClause:
    return IterationClause(head, (), (), body)


@dataclass(frozen=True)
class Metrics:
    size: int
    md: int
    mdt: int
    mdi: int
    max_diamond_index: int
    head_count: int


@dataclass(frozen=True)
class Program:
    variant: str
    head_order: tuple[str, ...]
    terminals: dict[str, Schema]
    iterations: dict[str, IterationClause]
    attention: frozenset[str]
    prints: frozenset[str]

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise VariantViolation(f"unknown variant {self.variant!r}")
        heads = set(self.head_order)
        if len(heads) != len(self.head_order):
            raise ProgramError("duplicate head in head order")
        if heads != set(self.terminals) or heads != set(self.iterations):
            raise ProgramError("terminals, iterations and head order disagree")
        if not (self.attention <= heads and self.prints <= heads):
            raise ProgramError("attention/print predicates must be heads")
        for h, clause in self.iterations.items():
            if clause.head != h:
                raise ProgramError(f"iteration clause for {h} names head {clause.head}")
        self._check_variant()

    # -- queries ----------------------------------------------------------

    @property
    def heads(self) -> tuple[str, ...]:
        return self.head_order

    def head_index(self, h: str) -> int:
        return self.head_order.index(h)

    @property
    def appointed(self) -> tuple[str, ...]:
        keep = self.attention | self.prints
        return tuple(h for h in self.head_order if h in keep)

    def all_schemata(self):
        for h in self.head_order:
            yield self.terminals[h]
            yield from self.iterations[h].all_schemata()

    def proposition_names(self) -> set[str]:
        out: set[str] = set()
        for s in self.all_schemata():
            out |= prop_names(s)
        return out

    def _check_variant(self):
        heads = set(self.head_order)
        for h in self.head_order:
            term = self.terminals[h]
            if has_var(term):
                raise VariantViolation(f"terminal body of {h} mentions a head predicate")
            for s in self.iterations[h].all_schemata():
                unknown = var_names(s) - heads
                if unknown:
                    raise ProgramError(f"{h}: unknown head predicates {sorted(unknown)}")
        plain_only = self.variant in ("msc", "mmsc")
        indexed = self.variant in ("mmsc", "mpmsc")
        for h in self.head_order:
            clause = self.iterations[h]
            if plain_only and clause.is_conditional:
                raise VariantViolation(f"{self.variant} forbids conditional clauses ({h})")
            for s in (self.terminals[h],) + clause.all_schemata():
                for node in walk(s):
                    if indexed and isinstance(node, Diamond):
                        raise VariantViolation(f"{self.variant} allows only indexed diamonds ({h})")
                    if not indexed and isinstance(node, DiamondI):
                        raise VariantViolation(f"{self.variant} forbids indexed diamonds ({h})")
        if self.variant == "mpmsc":
            for h in self.head_order:
                if modal_depth(self.terminals[h]) != 0:
                    raise VariantViolation(f"mpmsc terminal body of {h} must have modal depth 0")
                clause = self.iterations[h]
                for cond in clause.conditions:
                    if modal_depth(cond) != 0:
                        raise VariantViolation(f"mpmsc condition of {h} must have modal depth 0")
                for s in clause.bodies():
                    if modal_depth(s) > 1:
                        raise VariantViolation(f"mpmsc body of {h} exceeds modal depth 1")


def make_program(variant, terminals, iterations, attention=(), prints=(), head_order=None) -> Program:
    """Assemble a Program; head order defaults to the terminal list order."""
    term_map = dict(terminals)
    iter_map = {c.head: c for c in iterations}
    order = tuple(head_order) if head_order else tuple(h for h, _ in terminals)
    return Program(
        variant=variant,
        head_order=order,
        terminals=term_map,
        iterations=iter_map,
        attention=frozenset(attention),
        prints=frozenset(prints),
    )


def metrics(p: Program) -> Metrics:
    size = 0
    mdt = 0
    mdi = 0
    mdx = 0
    for h in p.head_order:
        term = p.terminals[h]
        clause = p.iterations[h]
        size += schema_size(term)
        mdt = max(mdt, modal_depth(term))
        mdx = max(mdx, max_diamond_index(term))
        for s in clause.all_schemata():
            size += schema_size(s)
            mdx = max(mdx, max_diamond_index(s))
        for s in clause.bodies():
            mdi = max(mdi, modal_depth(s))
        for s in clause.conditions:
            mdi = max(mdi, modal_depth(s))
    return Metrics(
        size=size,
        md=max(mdt, mdi),
        mdt=mdt,
        mdi=mdi,
        max_diamond_index=mdx,
        head_count=len(p.head_order),
    )


def subschemata(p: Program) -> set[Schema]:
    """SUBS: every subschema of every clause, plus the head predicates."""
    out: set[Schema] = {Var(h) for h in p.head_order}
    for s in p.all_schemata():
        out |= schema_subschemata(s)
    return out


def fresh_name(base: str, taken) -> str:
    """Deterministic fresh name: base, then base_2, base_3, ..."""
    if base not in taken:
        return base
    k = 2
    while f"{base}_{k}" in taken:
        k += 1
    return f"{base}_{k}"


_SANITIZE = re.compile(r"[^A-Za-z0-9_]+")


def name_for_schema(s: Schema, prefix: str = "X") -> str:
    """Readable deterministic name derived from the canonical print."""
    text = print_schema(s)
    text = (
        text.replace("<>", "d")
        .replace("!", "n")
        .replace("&", "_and_")
        .replace("<", "d")
        .replace(">", "_")
    )
    text = _SANITIZE.sub("_", text).strip("_")
    out = f"{prefix}_{text}" if text else prefix
    return out[:60]


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC_ATOM = 3
_PREC_UNARY = 2
_PREC_AND = 1


def _print_schema(s: Schema, prec: int) -> str:
    if isinstance(s, Top):
        return "T"
    if s == BOT:
        return "F"
    if isinstance(s, (Prop, Var)):
        return s.name
    if isinstance(s, Not):
        text = "!" + _print_schema(s.sub, _PREC_UNARY)
        return f"({text})" if prec > _PREC_UNARY else text
    if isinstance(s, Diamond):
        text = "<> " + _print_schema(s.sub, _PREC_UNARY)
        return f"({text})" if prec > _PREC_UNARY else text
    if isinstance(s, DiamondI):
        text = f"<{s.index}> " + _print_schema(s.sub, _PREC_UNARY)
        return f"({text})" if prec > _PREC_UNARY else text
    if isinstance(s, And):
        text = _print_schema(s.left, _PREC_AND) + " & " + _print_schema(s.right, _PREC_UNARY)
        return f"({text})" if prec > _PREC_AND else text
    raise TypeError(s)


def print_schema(s: Schema) -> str:
    return _print_schema(s, 0)


def print_program(p: Program) -> str:
    lines = [f"{p.variant} {{"]
    for h in p.head_order:
        lines.append(f"  {h}(0) := {print_schema(p.terminals[h])};")
    for h in p.head_order:
        clause = p.iterations[h]
        if clause.is_conditional:
            conds = ", ".join(print_schema(c) for c in clause.conditions)
            bodies = "; ".join(print_schema(b) for b in clause.bodies())
            lines.append(f"  {h} :=[{conds}] {bodies};")
        else:
            lines.append(f"  {h} := {print_schema(clause.backup)};")
    if p.attention:
        lines.append("  attention " + ", ".join(h for h in p.head_order if h in p.attention) + ";")
    if p.prints:
        lines.append("  print " + ", ".join(h for h in p.head_order if h in p.prints) + ";")
    lines.append("  order " + ", ".join(p.head_order) + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>[0-9]+)
  | (?P<diamond><\s*(?P<dindex>[0-9]+)\s*>|<>)
  | (?P<op><->|->|:=|[(){};,&|!\[\]])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    col: int
    index: int | None = None


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        col = pos - line_start + 1
        if m.lastgroup != "ws" and m.group("ws") is None:
            if m.group("name"):
                tokens.append(_Token("name", m.group("name"), line, col))
            elif m.group("number"):
                tokens.append(_Token("number", m.group("number"), line, col))
            elif m.group("diamond"):
                idx = m.group("dindex")
                tokens.append(_Token("diamond", m.group("diamond"), line, col,
                                     int(idx) if idx else None))
            else:
                tokens.append(_Token(m.group("op"), m.group("op"), line, col))
        newlines = m.group(0).count("\n")
        if newlines:
            line += newlines
            line_start = pos + m.group(0).rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _RawName(Schema):
    """Placeholder before head/proposition resolution (never escapes parse)."""

    def __init__(self, name: str):
        self.name = name


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def error(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    # schema := iff ; iff := impl ('<->' impl)* ; impl := or ('->' impl)?
    def schema(self) -> Schema:
        left = self.impl()
        while self.peek().kind == "<->":
            self.next()
            right = self.impl()
            left = iff(left, right)
        return left

    def impl(self) -> Schema:
        left = self.disj()
        if self.peek().kind == "->":
            self.next()
            right = self.impl()
            return implies(left, right)
        return left

    def disj(self) -> Schema:
        left = self.conj()
        while self.peek().kind == "|":
            self.next()
            left = or_(left, self.conj())
        return left

    def conj(self) -> Schema:
        left = self.unary()
        while self.peek().kind == "&":
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self) -> Schema:
        tok = self.peek()
        if tok.kind == "!":
            self.next()
            return Not(self.unary())
        if tok.kind == "diamond":
            self.next()
            sub = self.unary()
            return Diamond(sub) if tok.index is None else DiamondI(tok.index, sub)
        return self.atom()

    def atom(self) -> Schema:
        tok = self.next()
        if tok.kind == "(":
            s = self.schema()
            self.expect(")")
            return s
        if tok.kind == "name":
            if tok.text == "T":
                return TOP
            if tok.text == "F":
                return BOT
            if tok.text in RESERVED:
                raise ParseError(f"reserved word {tok.text!r} in schema", tok.line, tok.col)
            return _RawName(tok.text)
        raise ParseError(f"expected a schema, found {tok.text!r}", tok.line, tok.col)


def _resolve(s: Schema, heads: set[str], in_terminal: bool, head: str) -> Schema:
    if isinstance(s, _RawName):
        if s.name in heads:
            if in_terminal:
                raise VariantViolation(
                    f"terminal body of {head} mentions head predicate {s.name}"
                )
            return Var(s.name)
        return Prop(s.name)
    if isinstance(s, Not):
        return Not(_resolve(s.sub, heads, in_terminal, head))
    if isinstance(s, And):
        return And(_resolve(s.left, heads, in_terminal, head),
                   _resolve(s.right, heads, in_terminal, head))
    if isinstance(s, Diamond):
        return Diamond(_resolve(s.sub, heads, in_terminal, head))
    if isinstance(s, DiamondI):
        return DiamondI(s.index, _resolve(s.sub, heads, in_terminal, head))
    return s


def parse_program(text: str) -> Program:
    parser = _Parser(text)
    tok = parser.expect("name")
    if tok.text not in VARIANTS:
        raise ParseError(f"expected a program variant, found {tok.text!r}", tok.line, tok.col)
    variant = tok.text
    parser.expect("{")

    terminals: list[tuple[str, Schema]] = []
    raw_iterations: list[tuple[str, tuple, tuple, Schema]] = []
    attention: list[str] = []
    prints: list[str] = []
    order: list[str] | None = None

    def name_list() -> list[str]:
        names = [parser.expect("name").text]
        while parser.peek().kind == ",":
            parser.next()
            names.append(parser.expect("name").text)
        parser.expect(";")
        return names

    while parser.peek().kind != "}":
        tok = parser.expect("name")
        if tok.text == "attention":
            attention.extend(name_list())
            continue
        if tok.text == "print":
            prints.extend(name_list())
            continue
        if tok.text == "order":
            order = name_list()
            continue
        head = tok.text
        if head in RESERVED:
            raise ParseError(f"reserved word {head!r} as head", tok.line, tok.col)
        if parser.peek().kind == "(":
            parser.next()
            zero = parser.expect("number")
            if zero.text != "0":
                raise ParseError("expected 0 in terminal clause head", zero.line, zero.col)
            parser.expect(")")
            parser.expect(":=")
            body = parser.schema()
            parser.expect(";")
            terminals.append((head, body))
            continue
        parser.expect(":=")
        if parser.peek().kind == "[":
            parser.next()
            conds = [parser.schema()]
            while parser.peek().kind == ",":
                parser.next()
                conds.append(parser.schema())
            parser.expect("]")
            bodies = []
            for k in range(len(conds) + 1):
                if k > 0:
                    parser.expect(";")
                bodies.append(parser.schema())
            parser.expect(";")
            raw_iterations.append((head, tuple(conds), tuple(bodies[:-1]), bodies[-1]))
            continue
        body = parser.schema()
        parser.expect(";")
        raw_iterations.append((head, (), (), body))

    parser.expect("}")
    parser.expect("eof")

    term_heads = [h for h, _ in terminals]
    iter_heads = [h for h, _, _, _ in raw_iterations]
    if len(set(term_heads)) != len(term_heads):
        raise ProgramError("duplicate terminal clause")
    if len(set(iter_heads)) != len(iter_heads):
        raise ProgramError("duplicate iteration clause")
    heads = set(term_heads)
    resolved_terms = [(h, _resolve(s, heads, True, h)) for h, s in terminals]
    clauses = []
    for head, conds, conss, backup in raw_iterations:
        clauses.append(IterationClause(
            head,
            tuple(_resolve(c, heads, False, head) for c in conds),
            tuple(_resolve(c, heads, False, head) for c in conss),
            _resolve(backup, heads, False, head),
        ))
    head_order = tuple(order) if order else tuple(h for h, _ in resolved_terms)
    return Program(
        variant=variant,
        head_order=head_order,
        terminals=dict(resolved_terms),
        iterations={c.head: c for c in clauses},
        attention=frozenset(attention),
        prints=frozenset(prints),
    )

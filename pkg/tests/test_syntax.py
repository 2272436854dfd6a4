import pytest
from hypothesis import given, settings, strategies as st

from msckit.harness import random_program
from msckit.syntax import (
    And, Diamond, Not, ParseError, Prop, Var, VariantViolation, metrics,
    parse_program, print_program, print_schema, schema_subschemata, subschemata,
)


def test_parse_simple_msc():
    p = parse_program("msc { X(0) := p; X := <>X; attention X; print X }".replace("}", "; }"))
    assert p.variant == "msc"
    assert p.head_order == ("X",)
    assert p.terminals["X"] == Prop("p")
    assert p.iterations["X"].backup == Diamond(Var("X"))
    assert p.attention == {"X"} and p.prints == {"X"}


def test_mpmsc_depth_violation():
    with pytest.raises(VariantViolation):
        parse_program("mpmsc { X(0) := <1> p; X := X; }")


def test_mpmsc_consequence_depth_violation():
    with pytest.raises(VariantViolation):
        parse_program("mpmsc { X(0) := p; X := <1> <1> p; }")


def test_msc_rejects_indexed_diamond():
    with pytest.raises(VariantViolation):
        parse_program("msc { X(0) := p; X := <1> X; }")


def test_msc_rejects_conditional():
    with pytest.raises(VariantViolation):
        parse_program("msc { X(0) := p; X :=[p] X; X; }")


def test_terminal_cannot_use_heads():
    with pytest.raises(VariantViolation):
        parse_program("msc { X(0) := X; X := X; }")


def test_paper_example_metrics():
    p = parse_program("msc { X(0) := p; X := <> <> (<> <> X & <> X); }")
    m = metrics(p)
    assert m.mdt == 0 and m.mdi == 4 and m.md == 4


def test_size_counts_desugared_operators():
    p = parse_program("msc { X(0) := T; X := X; }")
    assert metrics(p).size == 2
    q = parse_program("msc { X(0) := F; X := X; }")  # F = !T counts 2
    assert metrics(q).size == 3


def test_subschemata_examples():
    p = parse_program("msc { X(0) := p; X := <> X; }")
    assert subschemata(p) == {Prop("p"), Var("X"), Diamond(Var("X"))}
    dup = parse_program("msc { X(0) := T; X := <> X & <> X; }")
    subs = subschemata(dup)
    assert len([s for s in subs if s == Diamond(Var("X"))]) == 1


def test_subschemata_deep_example():
    p = parse_program("msc { X(0) := p; X := <> <> (<> <> X & <> X); }")
    body = p.iterations["X"].backup
    expected = {
        body, body.sub, body.sub.sub,
        Diamond(Diamond(Var("X"))), Diamond(Var("X")), Var("X"), Prop("p"),
    }
    assert schema_subschemata(body) | {Prop("p")} == expected
    assert subschemata(p) == expected


def test_conditional_parse_and_print():
    text = """cmsc {
      X(0) := F;
      C(0) := p;
      X :=[C, !C & p] T; F; X;
      C := C;
      attention X;
    }"""
    p = parse_program(text)
    clause = p.iterations["X"]
    assert len(clause.conditions) == 2
    assert parse_program(print_program(p)) == p


def test_sugar_desugars():
    p = parse_program("msc { X(0) := p | q; X := X; }")
    body = p.terminals["X"]
    assert body == Not(And(Not(Prop("p")), Not(Prop("q"))))
    assert print_schema(body) == "!(!p & !q)"


def test_parse_error_position():
    with pytest.raises(ParseError):
        parse_program("msc { X(0) := ; X := X; }")


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000),
       st.sampled_from(["msc", "cmsc", "mmsc", "mpmsc"]))
def test_print_parse_roundtrip(seed, variant):
    p = random_program(variant, seed, heads=3, pi0=1, id_bits=2)
    assert parse_program(print_program(p)) == p


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_size_additive_over_clauses(seed):
    p = random_program("cmsc", seed, heads=3, pi0=1, id_bits=2)
    from msckit.syntax import schema_size
    total = 0
    for h in p.head_order:
        total += schema_size(p.terminals[h])
        total += sum(schema_size(s) for s in p.iterations[h].all_schemata())
    assert metrics(p).size == total

import itertools

import pytest

from msckit.colevishkin import (
    ColoringError, ColoringResult, CvParams, MissingOutput, NotSimpleGraphError,
    check_coloring, cv_head_count, cv_step, direct_cv_oracle, generate_cv3,
    generate_cv7, generate_cv_full, log_star, run_cv,
)
from msckit.harness import random_simple_graph
from msckit.syntax import metrics


def test_log_star_convention():
    assert log_star(4) == 0     # log(4) = 3
    assert log_star(7) == 0
    assert log_star(8) == 1     # log(8) = 4 -> 3
    assert log_star(16) == 1
    assert log_star(64) == 1
    assert log_star(256) == 2   # 9 -> 4 -> 3


def test_params_derivations():
    p = CvParams(n=16, delta=2)
    assert p.ell == 5 and p.clock_len == 3
    assert p.hours == log_star(16) + 3 == 4
    assert p.loop_count == 3 ** 2 - 2 == 7
    assert p.comm_rounds_cv7() == 5
    assert p.comm_rounds_cv3() == 13
    assert p.comm_rounds_full() == 19
    with pytest.raises(ColoringError):
        CvParams(n=1, delta=1)


def test_cv_step_prose_enumeration():
    # first bit of the new color is the differing bit's value, the rest is
    # the binary position of the rightmost differing bit
    for c, parent in itertools.product(range(8), range(8)):
        if c == parent:
            continue
        new = cv_step(c, parent)
        pos = next(i for i in range(1, 4) if (c >> (i - 1)) & 1 != (parent >> (i - 1)) & 1)
        bit = (c >> (pos - 1)) & 1
        assert new == bit + 2 * pos
    assert cv_step(2, 6) == 6  # parent 110, child 010: position 3, bit 0


def test_oracle_single_edge():
    result = direct_cv_oracle(2, [(1, 2)])
    assert set(result.colors) == {1, 2}
    assert result.colors[1] != result.colors[2]
    assert all(1 <= c <= 2 for c in result.colors.values())
    assert result.orientation[1] == ["LOW"]
    assert result.orientation[2] == ["HIGH"]


def test_oracle_rejects_bad_graphs():
    with pytest.raises(NotSimpleGraphError):
        direct_cv_oracle(2, [(1, 1)])
    with pytest.raises(NotSimpleGraphError):
        direct_cv_oracle(2, [(1, 3)])


def test_oracle_proper_on_many_random_graphs():
    checked = 0
    for seed in range(100):
        n = 4 + (seed * 11) % 61  # up to 64
        delta = 1 + seed % 4
        edges = random_simple_graph(n, delta, seed)
        if not edges:
            continue
        result = direct_cv_oracle(n, edges, delta=delta)
        adj = {}
        for (u, v) in edges:
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        for (u, v) in edges:
            assert result.colors[u] != result.colors[v], (seed, u, v)
        assert all(1 <= c <= delta + 1 for c in result.colors.values())
        checked += 1
    assert checked >= 90


def test_generated_program_is_valid_mpmsc():
    p = CvParams(n=6, delta=2)
    for gen in (generate_cv7, generate_cv3, generate_cv_full):
        prog = gen(p)
        assert prog.variant == "mpmsc"
        mm = metrics(prog)
        assert mm.mdt == 0 and mm.mdi <= 1
        assert prog.attention == prog.prints


def test_cv7_appointed_count():
    p = CvParams(n=6, delta=2)
    prog = generate_cv7(p)
    assert len(prog.appointed) == 7 ** 2
    prog3 = generate_cv3(p)
    assert len(prog3.appointed) == 3 ** 2
    full = generate_cv_full(p)
    assert len(full.appointed) == 2 + 1


def test_head_growth_over_n():
    heads = [cv_head_count(generate_cv7(CvParams(n=n, delta=2)))
             for n in (4, 8, 16, 32)]
    assert heads == sorted(heads)
    assert heads[-1] <= 10 * 2 * CvParams(n=32, delta=2).ell


def test_two_node_cv7_run():
    r = run_cv(2, [(1, 2)], stage="7")
    verdict = check_coloring(r.result, 2, [(1, 2)], 7)
    assert verdict["passed"]
    assert r.comm_round_count == r.params.comm_rounds_cv7()
    oracle = direct_cv_oracle(2, [(1, 2)])
    assert r.orientation_of_program()[1][0] == oracle.orientation[1][0]
    assert r.orientation_of_program()[2][0] == oracle.orientation[2][0]


def test_six_cycle_full_run():
    edges = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)]
    r = run_cv(6, edges, stage="final", delta=2)
    verdict = check_coloring(r.result, 6, edges, 3)
    assert verdict["passed"]
    assert r.comm_round_count == r.params.comm_rounds_full()


def test_check_coloring_verdicts():
    ok = ColoringResult(outputs={0: "10", 1: "10"}, palette=2)
    verdict = check_coloring(ok, 2, [], 2)
    assert verdict["proper"] and verdict["passed"]
    bad = check_coloring(ok, 2, [(1, 2)], 2)
    assert not bad["proper"] and bad["bad_edge"] == (1, 2)
    two_ones = ColoringResult(outputs={0: "11", 1: "10"}, palette=2)
    assert not two_ones.one_hot
    with pytest.raises(MissingOutput):
        check_coloring(ColoringResult(outputs={0: "10"}, palette=2), 2, [], 2)


def test_degree_bound_enforced():
    with pytest.raises(ColoringError):
        run_cv(3, [(1, 2), (2, 3), (1, 3)], delta=1)


def test_delta_cap():
    with pytest.raises(ColoringError):
        generate_cv7(CvParams(n=4, delta=5))
    from msckit.colevishkin import appointed_counts
    assert appointed_counts("7", 2) == {"raw": 64, "emitted": 49}
    assert appointed_counts("3", 2) == {"raw": 16, "emitted": 9}
    assert appointed_counts("final", 2) == {"raw": 3, "emitted": 3}


def test_full_run_delta_three():
    edges = [(1, 2), (1, 3), (1, 4)]  # star, degree 3
    r = run_cv(4, edges, stage="final", delta=3)
    verdict = check_coloring(r.result, 4, edges, 4)
    assert verdict["passed"]
    assert r.comm_round_count == r.params.comm_rounds_full()

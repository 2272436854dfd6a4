"""Acceptance gate: one test per criterion, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` (or via the CLI:
``msckit verify``) to see the per-criterion lines.
"""

from msckit.suites import run_suite


def _report(number, title, results, limit):
    passed = all(r.passed for r in results)
    elapsed = sum(r.elapsed for r in results)
    status = "PASS" if passed else "FAIL"
    print(f"[criterion {number}] {status} {title} ({elapsed:.1f}s, limit {limit:.0f}s)")
    for r in results:
        for line in r.lines:
            print(f"    {line}")
    assert passed, f"criterion {number} failed: {title}"
    assert elapsed < limit, f"criterion {number} exceeded the time limit"


def test_criterion_1_semantics_oracle():
    r = run_suite("semantics", seed=0)
    _report(1, "configurations match expanded iteration formulas "
               "(50 programs x 10 models, rounds 0..4)", [r], 30)


def test_criterion_2_clock_golden():
    r = run_suite("clock", seed=0)
    _report(2, "clock(4) trace matches the golden rows; minute hand "
               "lexicographic", [r], 1)


def test_criterion_3_diamond_golden():
    r = run_suite("diamond", seed=0)
    _report(3, "neighbour-scan scenario (IDs 000/010/111) matches the "
               "golden table", [r], 1)


def test_criterion_4_translation_equivalences():
    names = ["cmsc-msc", "mpmsc-mpc", "mpc-mpmsc", "term-zero", "msc1",
             "elim-diamonds", "msc-mpc", "mpc-msc"]
    results = [run_suite(name, seed=0) for name in names]
    _report(4, "translation equivalences (at least 30 cases each)", results, 300)


def test_criterion_5_combine_exhaustive():
    r = run_suite("combine", seed=0)
    _report(5, "two-circuit mux exhaustive over 512 inputs", [r], 1)


def test_criterion_6_cv_round_counts():
    r = run_suite("cv-counts", seed=0)
    _report(6, "Cole-Vishkin global communication round counts at "
               "n in {4,8,16}, delta 2", [r], 360)


def test_criterion_7_cv_coloring():
    r = run_suite("cv-coloring", seed=0)
    _report(7, "coloring correctness and oracle orientation on 20 random "
               "graphs + the 6-cycle", [r], 300)


def test_criterion_8_size_scaling():
    r = run_suite("size-scaling", seed=0)
    _report(8, "size-scaling ratios below the documented bounds", [r], 60)

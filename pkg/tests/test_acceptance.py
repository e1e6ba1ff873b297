"""Top-level acceptance gate: one test and one printed line per criterion.

Each test runs the corresponding numbered criterion from
mobiusphase.acceptance and prints its pass/fail line straight to the
terminal (bypassing capture), so a full run always shows the ten verdicts.
"""

import pytest

from mobiusphase import acceptance


def _run(number: int, capsys) -> None:
    result = acceptance.ALL_CRITERIA[number - 1]()
    with capsys.disabled():
        print(result.line())
    assert result.passed, result.detail
    assert result.number == number


def test_criterion_01_mobius_partial_sums(capsys):
    _run(1, capsys)


def test_criterion_02_bias_oracle_equivalence(capsys):
    _run(2, capsys)


def test_criterion_03_exact_inequality_suite(capsys):
    _run(3, capsys)


def test_criterion_04_rearrangement_exhaustive(capsys):
    _run(4, capsys)


def test_criterion_05_phase_approximation_contract(capsys):
    _run(5, capsys)


def test_criterion_06_uniformity_inverse(capsys):
    _run(6, capsys)


def test_criterion_07_cascade_machinery(capsys):
    _run(7, capsys)


def test_criterion_08_progression_solution_counts(capsys):
    _run(8, capsys)


def test_criterion_09_decay_determinism(capsys):
    _run(9, capsys)


def test_criterion_10_dichotomy_instance(capsys):
    _run(10, capsys)


def test_run_all_reports_every_criterion():
    results = acceptance.run_all([1])
    assert len(results) == 1 and results[0].number == 1
    table = acceptance.format_table(results)
    assert table.endswith("1/1 criteria passed\n")

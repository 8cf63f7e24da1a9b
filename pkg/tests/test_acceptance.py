"""Acceptance criteria at their stated tolerances, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""
import pytest

from monoloc.acceptance import CRITERIA, NAMES, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=lambda i: f"criterion_{i}")
def test_criterion(number):
    res = run_criterion(number, seed=0)
    print("\n" + res.line())
    for c in res.failures():
        print(f"    failed: {c.name}: observed {c.observed} vs bound {c.bound}")
    for note in res.notes:
        print(f"    note: {note}")
    assert res.within_budget, f"{NAMES[number]} took {res.seconds:.1f}s > {res.budget}s"
    assert res.passed, "; ".join(c.name for c in res.failures())

"""The ten acceptance criteria at their stated tolerances.

One module-scoped run evaluates every criterion on all shipped graphs; each
test then checks one result and records its pass/fail line, which is printed
in the terminal summary.
"""

import pytest

from holoshear.acceptance import DEFAULT_TOLERANCES, NAMES, run_acceptance

from conftest import ACCEPTANCE_LINES


@pytest.fixture(scope="module")
def results():
    return {r.number: r for r in run_acceptance(seed=7)}


@pytest.mark.parametrize("k", sorted(NAMES), ids=[f"{k}-{NAMES[k]}" for k in sorted(NAMES)])
def test_criterion(results, k):
    r = results[k]
    line = r.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert r.tolerance == DEFAULT_TOLERANCES[k]
    assert r.passed, line

"""The ten acceptance criteria, each at its stated tolerance (exact throughout).

Each test records one pass/fail line; the lines are printed together in the
terminal summary.  A failing criterion prints its details, which include the
counterexamples found.
"""

import json

import pytest

from meshulam.verify import CRITERIA, DEFAULT_SEED, run_all


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_acceptance_criterion(number, acceptance_log):
    (result,) = run_all([number], seed=DEFAULT_SEED)
    line = result.line()
    acceptance_log.append((number, line))
    print(line)
    assert result.passed, json.dumps(result.to_json(), indent=2, sort_keys=True, default=str)

"""Headline claims, each at its stated tolerance and time limit."""

import pytest

from lambek import acceptance

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("case", acceptance.CASES, ids=acceptance.CASE_KEYS)
def test_criterion(case):
    outcome = acceptance.run(case)
    ACCEPTANCE_LINES.append(outcome.line())
    print(outcome.line())
    assert outcome.passed, outcome.detail

"""Acceptance gate: one test per criterion, one verdict line each."""

import pytest

from fracpicard.acceptance import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k}" for k in range(1, len(CRITERIA) + 1)])
def test_criterion(criterion, acceptance_log):
    result = criterion(0)
    line = result.line()
    acceptance_log.append(line)
    print(line)
    assert result.passed, line

"""The ten acceptance criteria, one test each; a PASS/FAIL line per criterion
is printed in the terminal summary."""

import pytest

from heckeint.acceptance import CHECKS, run_check

RESULTS = []


@pytest.mark.parametrize("number", range(1, len(CHECKS) + 1))
def test_criterion(number):
    res = run_check(number, fast=False)
    line = f"{res.line()} ({res.seconds:.1f}s)"
    RESULTS.append(line)
    print(line)
    assert res.ok, line

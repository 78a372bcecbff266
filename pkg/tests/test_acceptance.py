"""One test per acceptance criterion; each prints a PASS/FAIL line with its numbers."""

import pytest

from matroid_lab.acceptance import CHECKS, run_check

TIME_LIMITS = {1: 120, 4: 300, 7: 180, 9: 60}


@pytest.mark.parametrize("number", [num for num, _, _ in CHECKS], ids=[f"criterion_{num}" for num, _, _ in CHECKS])
def test_criterion(number, capsys):
    result = run_check(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
    if number in TIME_LIMITS:
        assert result.seconds < TIME_LIMITS[number]

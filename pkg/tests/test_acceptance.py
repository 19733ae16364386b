"""Acceptance gate: one line per criterion, at the tolerances it states.

Run with ``pytest tests/test_acceptance.py -v``; each test prints its
``[PASS]``/``[FAIL]`` line even when output capture is on.
"""

import pytest

from vacline import acceptance


@pytest.mark.parametrize("check", acceptance.CHECKS, ids=[c.__name__ for c in acceptance.CHECKS])
def test_criterion(check, capsys):
    result = check()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail

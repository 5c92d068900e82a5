"""
Acceptance criteria, one test each. Every test emits a single PASS/FAIL
line with the measured values; the lines are repeated in a block at the
end of the pytest run.
"""

import pytest

from qwboost.acceptance import CRITERIA


@pytest.mark.parametrize("check", CRITERIA, ids=lambda f: f.__name__)
def test_criterion(check, record_property):
    res = check()
    print(res.line())
    record_property("criterion", res.line())
    assert res.passed, res.line()

"""One test per acceptance criterion, at full scale unless SLEBUBBLES_FAST=1.

Each test prints a single PASS/FAIL line with the measured numbers (shown by
``pytest -s`` or in the captured output of failures) and asserts the result.
"""
import os

import pytest

from slebubbles import acceptance

FAST = os.environ.get("SLEBUBBLES_FAST", "") not in ("", "0")


@pytest.mark.slow
@pytest.mark.parametrize("check", acceptance.CRITERIA, ids=lambda f: f.__name__)
def test_criterion(check):
    res = acceptance.run_criterion(check, fast=FAST)
    print(res.line())
    assert res.passed, res.line()

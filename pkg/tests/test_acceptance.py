"""Acceptance gate: every criterion runs at its stated tolerance and prints
one pass/fail line."""

import pytest

from wentzell.acceptance import ALL_CRITERIA


@pytest.mark.parametrize("criterion", ALL_CRITERIA,
                         ids=[fn.__name__.removeprefix("criterion_")
                              for fn in ALL_CRITERIA])
def test_criterion(criterion):
    import time
    start = time.perf_counter()
    result = criterion()
    result.runtime = time.perf_counter() - start
    print(result.line())
    assert result.passed, f"{result.name}: {result.details}"

from __future__ import annotations

import pytest


@pytest.fixture
def hand_trace():
    # flows a..e as 1..5
    return [(1, 5), (2, 3), (3, 2), (4, 1), (1, 2), (5, 4)]


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    results = test_acceptance.RESULTS
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

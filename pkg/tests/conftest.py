"""Shared pytest wiring.

The acceptance suite gets its own terminal section: one PASS/FAIL line per
guarantee, labelled by the test's docstring headline, so a run's verdict on
the advertised behaviour is readable without scrolling through node ids.
"""

from __future__ import annotations

import pytest

_ACCEPTANCE: dict[str, tuple[int, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if "test_acceptance" not in item.nodeid:
        return
    record = report.when == "call" or (report.when == "setup" and report.outcome != "passed")
    if not record:
        return
    fn = getattr(item, "function", None)
    doc = (getattr(fn, "__doc__", None) or item.name).strip().splitlines()[0]
    line = fn.__code__.co_firstlineno if fn is not None else 0
    _ACCEPTANCE[item.nodeid] = (line, doc, report.outcome)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, doc, outcome in sorted(_ACCEPTANCE.values()):
        flag = "PASS" if outcome == "passed" else "FAIL"
        suffix = "" if outcome in ("passed", "failed") else f" ({outcome})"
        terminalreporter.write_line(f"{flag}  {doc}{suffix}")

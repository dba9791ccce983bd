"""Shared test configuration.

Makes the sibling oracle module importable and prints one summary line per
acceptance scenario at the end of the run.
"""

import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_ACCEPTANCE_RESULTS = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _ACCEPTANCE_RESULTS.append((name, report.outcome.upper(), report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance scenarios")
    for name, outcome, seconds in _ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{name}: {outcome} ({seconds:.2f}s)")

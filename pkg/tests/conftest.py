"""Shared test wiring.

Collects the outcome of every acceptance criterion test and prints one
PASS/FAIL line per criterion at the end of the run, so the acceptance
status is readable without scrolling through the full pytest output.
"""

import pytest

_acceptance_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    if not item.name.startswith("test_criterion_"):
        return
    doc = item.function.__doc__ or item.name
    label = doc.strip().splitlines()[0].rstrip(".")
    _acceptance_results[item.name] = (label, report.outcome)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_acceptance_results):
        label, outcome = _acceptance_results[name]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {label}")

"""Prints one pass/fail line per acceptance criterion at the end of the run."""

import pytest

_outcomes: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    key = (str(marker.args[0]), marker.args[1])
    failed = report.failed or (report.when == "call" and report.outcome != "passed")
    if report.when == "call" or failed:
        prev = _outcomes.get(key, "PASS")
        _outcomes[key] = "FAIL" if failed or prev == "FAIL" else "PASS"


def _order(item):
    number = item[0][0]
    digits = number.rstrip("abcdefghijklmnopqrstuvwxyz")
    return int(digits), number


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), status in sorted(_outcomes.items(), key=_order):
        terminalreporter.write_line(f"criterion {number:<3} {status}  {title}")

"""Collects one PASS/FAIL line per acceptance criterion and prints them after the run."""

import pytest

_LINES = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config.stash[_LINES] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when == "teardown":
        return
    if report.when == "setup" and report.passed:
        return
    number, title = marker.args
    detail = "; ".join(v for k, v in item.user_properties if k == "detail")
    status = "PASS" if report.passed else "FAIL"
    line = f"criterion {number:>2} {status}  {title}" + (f"  [{detail}]" if detail else "")
    item.config.stash[_LINES][number] = line


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, {})
    if not lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(lines):
        terminalreporter.write_line(lines[number])

import time

import pytest

_acceptance_results = []


def pytest_configure(config):
    config._session_start = time.perf_counter()


@pytest.fixture(scope="session")
def session_start(request):
    return request.config._session_start


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance_results.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    # one pass/fail line per acceptance criterion
    if not _acceptance_results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _acceptance_results:
        terminalreporter.write_line(f"  {outcome.upper():6s} {name}")

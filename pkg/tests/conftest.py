import numpy as np
import pytest

_CRITERIA = {}
_OUTCOMES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_collection_modifyitems(config, items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _CRITERIA[item.nodeid] = mark.args


def pytest_runtest_logreport(report):
    if report.nodeid not in _CRITERIA:
        return
    if report.when == "call" or report.failed or report.skipped:
        prev = _OUTCOMES.get(report.nodeid, "passed")
        _OUTCOMES[report.nodeid] = report.outcome if prev == "passed" else prev


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (number, title) in sorted(_CRITERIA.items(), key=lambda kv: kv[1][0]):
        if nodeid in _OUTCOMES:
            outcome = _OUTCOMES[nodeid]
            word = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
            terminalreporter.write_line(f"{word} criterion {number:2d}: {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

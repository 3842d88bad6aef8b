from pathlib import Path

import pytest

from focuscrawl.fetcher import FetchLimits

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

OFFLINE = FetchLimits(min_delay=0.0)


class FakeClock:
    """Monotonic clock that only moves when something sleeps on it."""

    def __init__(self, start=0.0):
        self.now = start
        self.sleeps = []

    def __call__(self):
        return self.now

    def sleep(self, seconds):
        self.sleeps.append(seconds)
        self.now += seconds


@pytest.fixture
def fake_clock():
    return FakeClock()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


# -- acceptance summary -----------------------------------------------------------------

_criteria = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = _marker_of(report)
    if marker is None:
        return
    number, title = marker
    outcome = report.outcome
    previous = _criteria.get(number)
    if previous is None or previous[1] == "passed":
        _criteria[number] = (title, outcome)


def _marker_of(report):
    for name, args in getattr(report, "criterion", ()) or ():
        return args
    return None


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = [("criterion", marker.args)]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, outcome = _criteria[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {number:>2}. {title}")

"""Acceptance bookkeeping: runtime bounds and a one-line verdict per criterion."""

from __future__ import annotations

import pytest

_RESULTS: dict[str, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, bound, title): acceptance criterion with a runtime bound in seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, bound, title = marker.args
    if report.passed and call.duration > bound:
        report.outcome = "failed"
        report.longrepr = f"criterion {number} took {call.duration:.2f} s, bound is {bound} s"
    entry = _RESULTS.setdefault(number, {"title": title, "bound": bound, "passed": True, "seconds": 0.0})
    entry["passed"] &= report.passed
    entry["seconds"] += call.duration


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS, key=lambda n: (int(n.rstrip("abc")), n)):
        r = _RESULTS[number]
        verdict = "PASS" if r["passed"] else "FAIL"
        terminalreporter.write_line(
            f"criterion {number:>3}: {verdict}  {r['seconds']:6.2f} s (bound {r['bound']} s)  {r['title']}"
        )

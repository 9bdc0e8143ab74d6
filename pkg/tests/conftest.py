"""Collects ``@pytest.mark.criterion`` outcomes and prints one line per
acceptance criterion at the end of the run."""

import pytest

_RESULTS: dict[int, tuple[str, str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion implemented by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "setup" and rep.skipped:
        _RESULTS[number] = (title, "SKIP", [str(rep.longrepr[2]) if isinstance(rep.longrepr, tuple) else ""])
    elif rep.when == "call":
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        details = [f"{k}={v}" for k, v in item.user_properties]
        _RESULTS[number] = (title, status, details)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, status, details = _RESULTS[number]
        extra = f"  ({'; '.join(details)})" if details and any(details) else ""
        terminalreporter.write_line(f"criterion {number:>2} {status:4s} {title}{extra}")

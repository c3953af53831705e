import pytest

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    rep = outcome.get_result()
    key = mark.args
    if rep.when == "call" or rep.failed:
        ok = rep.passed and _results.get(key, (True, 0.0))[0]
        _results[key] = (ok, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), (ok, duration) in sorted(_results.items()):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:2d}. {title} ({duration:.2f} s)")

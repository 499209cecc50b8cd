from collections import defaultdict

import pytest

_criteria = defaultdict(list)
PROPERTY_MODULE = "test_properties.py"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
    config.property_results = {}


def pytest_collection_modifyitems(config, items):
    # the property-suite criterion summarises test_properties.py, so it runs last
    last = [i for i in items if (m := i.get_closest_marker("criterion")) and m.args[0] == 9]
    items[:] = [i for i in items if i not in last] + last


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.path.name == PROPERTY_MODULE and rep.when == "call":
        item.config.property_results[item.name] = (rep.passed, rep.duration)
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _criteria[marker.args[0]].append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        ok = all(passed for _, passed in results)
        failed = [name for name, passed in results if not passed]
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({len(results)} checks)"
        if failed:
            line += " failing: " + ", ".join(failed)
        terminalreporter.write_line(line)

import pytest

from maneuver_routing.formats import load_fixture
from maneuver_routing.oracle import GenParams, random_proper_network

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None or report.when not in ("setup", "call"):
        return
    if report.when == "setup" and report.passed:
        return
    number, title = marker
    _criteria[number] = (title, "PASS" if report.passed else "FAIL")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, verdict = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")


@pytest.fixture(scope="session")
def net_a():
    return load_fixture("net_a")


@pytest.fixture(scope="session")
def net_b():
    return load_fixture("net_b")


def walk(net, *names):
    return net.graph.walk_from_names(names)


def vid(net, name):
    return net.graph.vertex(name)


def generated(seed, **overrides):
    return random_proper_network(GenParams(seed=seed, **overrides))

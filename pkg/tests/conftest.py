import math

import pytest

from dma_nearfield import ArrayConfig, SphericalPosition, available_backends
from dma_nearfield import beamdepth, gain, specfun

BACKENDS = available_backends()


@pytest.fixture(params=sorted(BACKENDS))
def kernels(request):
    """Each available kernel module in turn."""
    return BACKENDS[request.param]


@pytest.fixture(params=sorted(BACKENDS))
def backend(request, monkeypatch):
    """Route the library modules through each kernel backend in turn."""
    mod = BACKENDS[request.param]
    for target in (specfun, gain, beamdepth):
        monkeypatch.setattr(target, "kernels", mod)
    return request.param


@pytest.fixture
def array():
    return ArrayConfig.reference_default()


@pytest.fixture
def fig1_user():
    return SphericalPosition(7.0, math.pi / 3, math.pi / 2)


@pytest.fixture
def fig3_user():
    return SphericalPosition(30.0, math.pi / 3, math.pi / 3)


# -- acceptance report: one PASS/FAIL line per criterion ----------------------

_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(item.user_properties).get("detail", "")
        _ACCEPTANCE.append((marker.args[0], marker.args[1], report.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome, detail in sorted(_ACCEPTANCE):
        status = "PASS" if outcome == "passed" else "FAIL"
        line = f"[{status}] {number:>2}. {title}"
        terminalreporter.write_line(f"{line}  ({detail})" if detail else line)

import pytest

from rfexposure.antenna import ArrayConfig, ElementPattern
from rfexposure.kernels import get_backend
from rfexposure.scenario import load_config


@pytest.fixture(params=["numpy", "numba"])
def backend(request):
    return get_backend(request.param)


@pytest.fixture
def pattern_5g():
    return ElementPattern(phi_3db=65.0, theta_3db=65.0, a_m=30.0, g_max=5.0)


@pytest.fixture
def pattern_r9():
    return ElementPattern(phi_3db=70.0, theta_3db=35.0, a_m=23.0, g_max=17.0)


@pytest.fixture
def array_8x8():
    return ArrayConfig(8, 8, element_power_dbm=21.0, element_gain_dbi=5.0)


@pytest.fixture(scope="session")
def preset():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_config(name)
        return cache[name]
    return get


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one verdict line per acceptance criterion."""
    def record(number, title, ok, detail=""):
        line = f"criterion {number:2d} [{'PASS' if ok else 'FAIL'}] {title}"
        ACCEPTANCE_LINES.append(line + (f": {detail}" if detail else ""))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

import numpy as np
import pytest

from herzlab.grid import SampledFunction, make_grid

# lines collected by the acceptance tests, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def spec():
    return make_grid(1, 6, 16384, -20, 6)


@pytest.fixture(scope="session")
def small():
    return make_grid(1, 4, 2048, -8, 4)


@pytest.fixture(scope="session")
def spec2():
    return make_grid(2, 3, 128, -6, 3)


def indicator(spec, a, b):
    x = spec.coords[0]
    return SampledFunction(spec, ((x >= a) & (x <= b)).astype(float), f"chi[{a},{b}]")


def gaussian(spec, sigma=1.0, center=0.0):
    x = spec.coords[0]
    return SampledFunction(spec, np.exp(-((x - center) ** 2) / sigma**2), "gauss")

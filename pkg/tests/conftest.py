import numpy as np
import pytest

from rsapprox import FieldModel, GridBump, Point2, RapidityGrid, Region, WedgeEngine
from rsapprox.timeslice import TimesliceParams, general_error

# wedge-supported bump used by the sweep and acceptance tests
PINNED_ZETAS = [0.5, 0.1, 0.02, 0.01, 0.003, 0.001, 0.0003, 0.0001]


def pinned_bump():
    return GridBump.bump(Point2(0.0, -3.0), 1.0, 1.0, amplitude=3.0)


def bumps_for_oracle():
    return [
        pinned_bump(),
        GridBump.bump(Point2(0.5, -4.0), 0.8, 1.4, amplitude=2.0),
        GridBump.bump(Point2(-0.7, -2.6), 1.2, 0.9, amplitude=1.5),
    ]


@pytest.fixture(scope="session")
def grid():
    return RapidityGrid()


@pytest.fixture(scope="session")
def model():
    return FieldModel(1.0)


@pytest.fixture(scope="session")
def bump():
    return pinned_bump()


@pytest.fixture(scope="session")
def engine(bump, grid, model):
    return WedgeEngine(bump, grid, model)


@pytest.fixture(scope="session")
def slab_report():
    f = GridBump.bump(Point2(-1.2, 1.8), 0.6, 2.2, amplitude=3.0)
    U = Region.diamond(Point2(0.0, 0.0), 2.0)
    return f, U, general_error(f, U, 0.1, TimesliceParams(), oracle=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criteria report one PASS/FAIL line each in the terminal summary
ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def record():
    def _record(n: int, title: str, passed: bool, detail: str):
        line = f"{'PASS' if passed else 'FAIL'} criterion {n:2d} ({title}): {detail}"
        ACCEPTANCE[n] = line
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])

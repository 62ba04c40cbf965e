import numpy as np
import pytest

from strichartz_lab.euler_lagrange import SolverConfig, power_iterate
from strichartz_lab.fields import random_initial_field
from strichartz_lab.grid import Grid2D, TimeQuadrature, gaussian_field, l2_norm

_VERDICTS = []


def record(label: str, passed: bool, detail: str = ""):
    """Print and keep a one-line verdict for the terminal summary."""
    line = f"{label}: {'PASS' if passed else 'FAIL'}{'  ' + detail if detail else ''}"
    print(line)
    _VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def grid64():
    return Grid2D(64, 10.0)


@pytest.fixture(scope="session")
def tq129():
    return TimeQuadrature.tangent_legendre(129, 0.5)


@pytest.fixture(scope="session")
def unit_gaussian(grid64):
    g = gaussian_field(grid64, -0.5)
    return g * (1.0 / l2_norm(g))


@pytest.fixture(scope="session")
def converged(grid64, tq129):
    """Extremizer from the seed-42 random start; shared by several test modules."""
    f0 = random_initial_field(grid64, "random", 42)
    return power_iterate(f0, tq129, SolverConfig())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

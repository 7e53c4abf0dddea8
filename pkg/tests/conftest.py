import numpy as np
import pytest

from capkit.space import build_grid, make_space, random_space, three_chain, two_point_space


@pytest.fixture
def two_point():
    return two_point_space()


@pytest.fixture
def chain():
    return three_chain()


@pytest.fixture(scope="session")
def grid6():
    return build_grid(1, 6)


@pytest.fixture(scope="session")
def grid2d():
    return build_grid(2, 3)


def small_spaces(count=8, seed=0, n_range=(3, 12)):
    """Seeded random point clouds used across modules."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(*n_range))
        out.append(random_space(rng, n, dim=int(rng.integers(1, 3)), mass_spread=0.7))
    return out


def matrix_space(D, masses=None):
    D = np.asarray(D, dtype=float)
    m = np.ones(len(D)) if masses is None else masses
    return make_space([str(i) for i in range(len(D))], m, D)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

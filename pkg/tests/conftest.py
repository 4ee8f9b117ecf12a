import importlib.resources

import numpy as np
import pytest

from l2plus import StateSpace, load_system


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance criterion lines even when their tests pass."""
    try:
        from test_acceptance import AC_LINES
    except ImportError:
        return
    if AC_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(AC_LINES):
            terminalreporter.write_line(line)


def fixture_path(name: str) -> str:
    return str(importlib.resources.files("l2plus") / "fixtures" / name)


@pytest.fixture(scope="session")
def example6() -> StateSpace:
    return load_system(fixture_path("example6.json"))


@pytest.fixture(scope="session")
def pos_g1() -> StateSpace:
    return load_system(fixture_path("pos_g1.json"))


@pytest.fixture(scope="session")
def pos_g2() -> StateSpace:
    return load_system(fixture_path("pos_g2.json"))


@pytest.fixture(scope="session")
def pos_g3() -> StateSpace:
    return load_system(fixture_path("pos_g3.json"))


@pytest.fixture
def first_order():
    """G(s) = 1/(s+1): monotone gain, peak at omega = 0."""
    return StateSpace([[-1.0]], [[1.0]], [[1.0]], [[0.0]], name="lowpass1")


@pytest.fixture
def high_pass():
    """G(s) = s/(s+1): gain increases to 1 as omega -> inf."""
    return StateSpace([[-1.0]], [[1.0]], [[-1.0]], [[1.0]], name="highpass1")


def random_stable_system(rng: np.random.Generator, n_max=5, nw_max=3, nz_max=3,
                         margin=0.2) -> StateSpace:
    """Dense random system, shifted to spectral abscissa <= -margin."""
    n = int(rng.integers(1, n_max + 1))
    nw = int(rng.integers(1, nw_max + 1))
    nz = int(rng.integers(1, nz_max + 1))
    A = rng.standard_normal((n, n))
    alpha = float(np.linalg.eigvals(A).real.max())
    A -= (alpha + margin) * np.eye(n)
    return StateSpace(A, rng.standard_normal((n, nw)), rng.standard_normal((nz, n)),
                      rng.standard_normal((nz, nw)))


def random_positive_system(rng: np.random.Generator, n_max=5, nw_max=3, nz_max=3) -> StateSpace:
    """Internally positive and stable: Metzler A made diagonally dominant."""
    n = int(rng.integers(1, n_max + 1))
    nw = int(rng.integers(1, nw_max + 1))
    nz = int(rng.integers(1, nz_max + 1))
    A = rng.random((n, n))
    np.fill_diagonal(A, 0.0)
    A -= np.diag(A.sum(axis=1) + rng.random(n) + 0.2)
    return StateSpace(A, rng.random((n, nw)), rng.random((nz, n)), rng.random((nz, nw)))

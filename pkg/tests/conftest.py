import math

import numpy as np
import pytest

from unruhbell.model import DensityMatrix

BELL = np.array([1, 0, 0, 1]) / math.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def bell():
    return DensityMatrix.from_pure(BELL)


def random_density(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_hermitian(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


def random_unitary(dim, rng):
    from unruhbell.linalg import hermitian_eigen

    return hermitian_eigen(random_hermitian(dim, rng)).eigenvectors


_ACCEPTANCE_LINES = []


def record_acceptance(line):
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from twomode.fock import FockDensityMatrix, PureState, coherent_state, rotate_state  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_pure(rng, n):
    z = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    return PureState.normalized(n, z).density_matrix()


def random_diagonal(rng, n):
    return FockDensityMatrix(n, np.diag(rng.dirichlet(np.ones(n + 1))))


def random_coherent_mixture(rng, n, terms=3):
    weights = rng.dirichlet(np.ones(terms))
    acc = np.zeros((n + 1, n + 1), dtype=complex)
    for w in weights:
        rho = coherent_state(rng.uniform(), rng.uniform(0, 2 * np.pi), n).density_matrix()
        axis = rng.standard_normal(3)
        axis /= np.linalg.norm(axis)
        rho = rotate_state(rho, axis, rng.uniform(0, np.pi))
        acc += w * rho.entries
    acc = 0.5 * (acc + acc.conj().T)
    return FockDensityMatrix(n, acc / np.trace(acc).real)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

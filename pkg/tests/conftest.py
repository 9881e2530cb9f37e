from functools import reduce
from importlib import resources

import numpy as np
import pytest

from aavqe.problems import load_instance
from aavqe.simulator import StateVector

PAULI = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
}

FIXTURES = resources.files("aavqe") / "fixtures"


def kron_dense(h):
    """Dense matrix from explicit Kronecker products; independent of the package kernels."""
    dim = 1 << h.n_qubits
    mat = h.constant * np.eye(dim, dtype=complex)
    for t in h.terms:
        # qubit 0 is the least significant bit, so it is the rightmost factor
        mat = mat + t.coefficient * reduce(np.kron, [PAULI[a] for a in reversed(t.axes)])
    return mat


def random_state(n, rng):
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, amps / np.linalg.norm(amps))


def fixture_path(name):
    return FIXTURES / name


def corpus(max_vars=None):
    paths = sorted(p for p in FIXTURES.iterdir() if p.name.endswith(".ec"))
    out = [(p.name, load_instance(p)) for p in paths]
    if max_vars is not None:
        out = [(n, i) for n, i in out if i.n_vars <= max_vars]
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(42)

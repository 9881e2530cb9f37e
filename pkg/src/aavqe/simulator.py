"""Dense state-vector simulator.

Qubit ``q`` is bit ``q`` of the amplitude index (qubit 0 is the least
significant bit). Kernels operate on flat complex arrays; :class:`StateVector`
wraps one together with its qubit count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import cos, sin

import numpy as np

from .errors import DomainError

MAX_QUBITS = 24
DEFAULT_SEED = 20190318

ROTATIONS = frozenset({"RX", "RY", "RZ"})
SINGLE_QUBIT = frozenset({"RX", "RY", "RZ", "X", "H"})
TWO_QUBIT = frozenset({"CZ", "CNOT"})

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise DomainError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise DomainError(
                f"expected {1 << self.n_qubits} amplitudes, got shape {self.amplitudes.shape}"
            )

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> StateVector:
        return StateVector(self.n_qubits, self.amplitudes.copy())


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    angle: float | None = field(default=None)

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if kind not in SINGLE_QUBIT | TWO_QUBIT:
            raise DomainError(f"unknown gate kind {self.kind!r}")
        arity = 1 if kind in SINGLE_QUBIT else 2
        if len(self.targets) != arity:
            raise DomainError(f"{kind} takes {arity} target(s), got {len(self.targets)}")
        if len(set(self.targets)) != len(self.targets):
            raise DomainError(f"{kind} targets must be distinct: {self.targets}")
        if kind in ROTATIONS:
            if self.angle is None:
                raise DomainError(f"{kind} requires an angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise DomainError(f"{kind} takes no angle")


def rx_matrix(theta: float) -> np.ndarray:
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry_matrix(theta: float) -> np.ndarray:
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz_matrix(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


def gate_matrix(gate: Gate) -> np.ndarray:
    """2x2 matrix of a single-qubit gate."""
    if gate.kind == "RX":
        return rx_matrix(gate.angle)
    if gate.kind == "RY":
        return ry_matrix(gate.angle)
    if gate.kind == "RZ":
        return rz_matrix(gate.angle)
    if gate.kind == "X":
        return _X
    if gate.kind == "H":
        return _H
    raise DomainError(f"{gate.kind} is not a single-qubit gate")


def apply_1q(amps: np.ndarray, n_qubits: int, qubit: int, matrix: np.ndarray) -> np.ndarray:
    """Return ``matrix`` applied to ``qubit`` of the flat amplitude array."""
    view = amps.reshape(1 << (n_qubits - 1 - qubit), 2, 1 << qubit)
    return np.einsum("ij,ajb->aib", matrix, view).reshape(-1)


def apply_cz(amps: np.ndarray, n_qubits: int, a: int, b: int) -> np.ndarray:
    out = amps.copy()
    idx = np.arange(1 << n_qubits)
    out[((idx >> a) & (idx >> b) & 1).astype(bool)] *= -1
    return out


def apply_cnot(amps: np.ndarray, n_qubits: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits)
    src = np.where((idx >> control) & 1, idx ^ (1 << target), idx)
    return amps[src]


def init_basis_state(n_qubits: int, bitstring: int) -> StateVector:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise DomainError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    if not 0 <= bitstring < (1 << n_qubits):
        raise DomainError(f"bitstring {bitstring} out of range for {n_qubits} qubits")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[bitstring] = 1.0
    return StateVector(n_qubits, amps)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply ``gate`` and return a new state; the input is left untouched."""
    n = state.n_qubits
    for t in gate.targets:
        if not 0 <= t < n:
            raise DomainError(f"target {t} out of range for {n} qubits")
    if gate.kind == "CZ":
        amps = apply_cz(state.amplitudes, n, *gate.targets)
    elif gate.kind == "CNOT":
        amps = apply_cnot(state.amplitudes, n, *gate.targets)
    else:
        amps = apply_1q(state.amplitudes, n, gate.targets[0], gate_matrix(gate))
    return StateVector(n, amps)


def apply_circuit(state: StateVector, gates) -> StateVector:
    for gate in gates:
        state = apply_gate(state, gate)
    return state


def sample_from_probabilities(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``shots`` basis indices by inverse-CDF sampling."""
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    out = np.searchsorted(cdf, rng.random(shots), side="right")
    # guards against a final cdf entry rounding below 1
    return np.minimum(out, len(probs) - 1)


def sample_bitstrings(state: StateVector, shots: int, rng_seed=DEFAULT_SEED) -> list[int]:
    """Measure every qubit in the computational basis ``shots`` times.

    ``rng_seed`` may be an integer or an existing ``numpy.random.Generator``.
    """
    if shots < 1:
        raise DomainError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(rng_seed)
    return sample_from_probabilities(state.probabilities(), shots, rng).tolist()

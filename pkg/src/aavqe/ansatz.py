"""Hardware-efficient ansatz: RY/RZ rotation layers separated by CZ ladders."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError
from .simulator import Gate, StateVector, apply_1q

ENTANGLERS = ("CZ_ladder",)


@dataclass(frozen=True)
class AnsatzSpec:
    n_qubits: int
    depth: int = 3
    entangler: str = "CZ_ladder"

    def __post_init__(self):
        if self.n_qubits < 1:
            raise DomainError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if self.depth < 0:
            raise DomainError(f"depth must be >= 0, got {self.depth}")
        if self.entangler not in ENTANGLERS:
            raise DomainError(f"unknown entangler {self.entangler!r}")

    @property
    def parameter_count(self) -> int:
        return 2 * self.n_qubits * (self.depth + 1)

    @property
    def cz_pairs(self) -> list[tuple[int, int]]:
        n = self.n_qubits
        return [(q, q + 1) for q in range(0, n - 1, 2)] + [(q, q + 1) for q in range(1, n - 1, 2)]

    @cached_property
    def _ladder_signs(self) -> np.ndarray:
        # all CZs in a ladder are diagonal, so the whole ladder is one sign vector
        idx = np.arange(1 << self.n_qubits, dtype=np.int64)
        parity = np.zeros_like(idx)
        for a, b in self.cz_pairs:
            parity ^= (idx >> a) & (idx >> b) & 1
        return 1.0 - 2.0 * parity

    def gates(self, theta) -> list[Gate]:
        """The circuit as an explicit gate list (slow path, for inspection and tests)."""
        theta = check_parameters(self, theta)
        out: list[Gate] = []
        for layer in range(self.depth + 1):
            if layer:
                out += [Gate("CZ", pair) for pair in self.cz_pairs]
            for q in range(self.n_qubits):
                base = 2 * (layer * self.n_qubits + q)
                out += [Gate("RY", (q,), theta[base]), Gate("RZ", (q,), theta[base + 1])]
        return out


def check_parameters(spec: AnsatzSpec, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.parameter_count,):
        raise DomainError(
            f"expected {spec.parameter_count} parameters, got shape {theta.shape}"
        )
    return theta


def _rotation_layer(thetas: np.ndarray) -> np.ndarray:
    """Stacked 2x2 matrices RZ(b) @ RY(a) for each (a, b) row."""
    a, b = thetas[:, 0] / 2, thetas[:, 1] / 2
    ca, sa = np.cos(a), np.sin(a)
    em, ep = np.exp(-1j * b), np.exp(1j * b)
    mats = np.empty((len(thetas), 2, 2), dtype=complex)
    mats[:, 0, 0] = em * ca
    mats[:, 0, 1] = -em * sa
    mats[:, 1, 0] = ep * sa
    mats[:, 1, 1] = ep * ca
    return mats


def prepare_state(spec: AnsatzSpec, theta) -> StateVector:
    """Run the ansatz on |0...0> and return the output state.

    Layer ``l`` applies RY(theta[2(lN+q)]) then RZ(theta[2(lN+q)+1]) on each
    qubit ``q``; layers after the first are preceded by a CZ ladder on pairs
    (0,1),(2,3),... then (1,2),(3,4),...
    """
    theta = check_parameters(spec, theta)
    n = spec.n_qubits
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    per_layer = theta.reshape(spec.depth + 1, n, 2)
    for layer in range(spec.depth + 1):
        if layer:
            amps = amps * spec._ladder_signs
        for q, mat in enumerate(_rotation_layer(per_layer[layer])):
            amps = apply_1q(amps, n, q, mat)
    return StateVector(n, amps)


def random_parameters(spec: AnsatzSpec, rng_seed) -> np.ndarray:
    """I.i.d. uniform angles in [-pi, pi)."""
    rng = np.random.default_rng(rng_seed)
    return rng.uniform(-np.pi, np.pi, spec.parameter_count)

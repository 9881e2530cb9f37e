"""Energy estimation: exact expectation values and simulated finite-shot measurement."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .hamiltonians import PauliHamiltonian, PauliString
from .problems import ExactCoverInstance
from .simulator import DEFAULT_SEED, StateVector, apply_1q, rx_matrix, sample_from_probabilities

DEFAULT_SHOTS = 1024

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
# RX(pi/2) maps the Y eigenbasis onto the Z eigenbasis: RX(a)^dag Z RX(a) = cos(a) Z + sin(a) Y
_Y_TO_Z = rx_matrix(np.pi / 2)


@dataclass(frozen=True)
class ShotBudget:
    """Shots per measurement group; ``None`` means exact expectation values."""

    shots_per_group: int | None = DEFAULT_SHOTS

    def __post_init__(self):
        if self.shots_per_group is not None and self.shots_per_group < 1:
            raise DomainError(f"shots_per_group must be >= 1, got {self.shots_per_group}")

    @property
    def is_exact(self) -> bool:
        return self.shots_per_group is None

    @classmethod
    def parse(cls, text) -> ShotBudget:
        if isinstance(text, ShotBudget):
            return text
        if text is None or str(text).strip().lower() == "exact":
            return EXACT
        return cls(int(text))

    def __str__(self) -> str:
        return "exact" if self.is_exact else str(self.shots_per_group)


EXACT = ShotBudget(None)


def _check(state: StateVector, h: PauliHamiltonian) -> None:
    if state.n_qubits != h.n_qubits:
        raise DomainError(f"state has {state.n_qubits} qubits, Hamiltonian {h.n_qubits}")


def expectation_exact(state: StateVector, h: PauliHamiltonian) -> float:
    _check(state, h)
    return h.expectation(state.amplitudes)


@dataclass(frozen=True)
class _RotatedGroup:
    term: PauliString
    rotations: tuple[tuple[int, np.ndarray], ...]


class MeasurementPlan:
    """Measurement groups for a Hamiltonian.

    All Z-only terms share one computational-basis group. Every string that
    contains X or Y gets its own group, measured after rotating each X qubit
    with H and each Y qubit with RX(pi/2).
    """

    def __init__(self, h: PauliHamiltonian):
        self.h = h
        self.has_diagonal = any(t.is_diagonal for t in h.terms)
        groups = []
        for t in h.terms:
            if t.is_diagonal:
                continue
            rot = tuple(
                (q, _H if a == "X" else _Y_TO_Z) for q, a in enumerate(t.axes) if a in "XY"
            )
            groups.append(_RotatedGroup(t, rot))
        self.rotated = tuple(groups)
        self._signs: dict[int, np.ndarray] = {}

    @property
    def n_groups(self) -> int:
        return int(self.has_diagonal) + len(self.rotated)

    def _parity_signs(self, mask: int) -> np.ndarray:
        if mask not in self._signs:
            idx = np.arange(1 << self.h.n_qubits, dtype=np.int64)
            self._signs[mask] = 1.0 - 2.0 * (np.bitwise_count(idx & mask) & 1)
        return self._signs[mask]

    def estimate(
        self, state: StateVector, shots: int, rng: np.random.Generator
    ) -> tuple[float, np.ndarray | None]:
        """Sampled energy and the raw computational-basis samples (if any)."""
        _check(state, self.h)
        n = state.n_qubits
        energy = self.h.constant
        diag_samples = None
        if self.has_diagonal:
            diag_samples = sample_from_probabilities(state.probabilities(), shots, rng)
            energy += float(self.h.diagonal_part[diag_samples].mean())
        for g in self.rotated:
            amps = state.amplitudes
            for q, mat in g.rotations:
                amps = apply_1q(amps, n, q, mat)
            samples = sample_from_probabilities(np.abs(amps) ** 2, shots, rng)
            energy += g.term.coefficient * float(
                self._parity_signs(g.term.support_mask)[samples].mean()
            )
        return energy, diag_samples


@lru_cache(maxsize=32)
def _plan(h: PauliHamiltonian) -> MeasurementPlan:
    return MeasurementPlan(h)


def expectation_sampled(
    state: StateVector, h: PauliHamiltonian, budget: ShotBudget, rng_seed=DEFAULT_SEED
) -> float:
    """Finite-shot energy estimate; unbiased over seeds."""
    _check(state, h)
    if budget.is_exact:
        raise DomainError("expectation_sampled needs a finite shot budget")
    rng = np.random.default_rng(rng_seed)
    return _plan(h).estimate(state, budget.shots_per_group, rng)[0]


def detect_solution(samples, instance: ExactCoverInstance) -> int | None:
    """First sampled assignment that satisfies every clause, else ``None``."""
    samples = np.asarray(samples, dtype=np.int64)
    if samples.size == 0:
        return None
    ok = np.ones(samples.shape, dtype=bool)
    for m in instance.clause_masks:
        ok &= np.bitwise_count(samples & m) == 1
    hits = np.flatnonzero(ok)
    return int(samples[hits[0]]) if hits.size else None

"""Exact classical references: dense spectra, brute-force EXACT COVER, gap profiles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResourceLimitError
from .hamiltonians import DENSE_MAX_QUBITS, PauliHamiltonian, interpolate, to_dense
from .problems import MAX_VARS, ExactCoverInstance

PROFILE_MAX_QUBITS = 12
DEGENERATE_GAP = 1e-9


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    ground_state: np.ndarray
    first_excited: np.ndarray

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def gap(self) -> float:
        return float(self.eigenvalues[1] - self.eigenvalues[0])


def exact_spectrum(h: PauliHamiltonian, k: int = 2) -> SpectrumReport:
    """Lowest ``k`` eigenpairs of ``h`` by dense diagonalization.

    Diagonal Hamiltonians skip the eigensolver: their spectrum is the sorted
    diagonal and the eigenvectors are basis states (stable sort, so the lowest
    index wins among degenerate levels).
    """
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    n = h.n_qubits
    if n > DENSE_MAX_QUBITS:
        raise ResourceLimitError(f"exact spectrum capped at {DENSE_MAX_QUBITS} qubits, got {n}")
    dim = 1 << n
    k = min(k, dim)
    if h.is_diagonal:
        diag = h.diagonal_part + h.constant
        order = np.argsort(diag, kind="stable")[:k]
        vecs = np.zeros((dim, 2), dtype=complex)
        vecs[order[0], 0] = 1.0
        vecs[order[1], 1] = 1.0
        return SpectrumReport(diag[order].copy(), vecs[:, 0], vecs[:, 1])
    mat = to_dense(h)
    mat = 0.5 * (mat + mat.conj().T)
    vals, vecs = np.linalg.eigh(mat)
    return SpectrumReport(vals[:k].copy(), vecs[:, 0].astype(complex), vecs[:, 1].astype(complex))


def brute_force_exact_cover(instance: ExactCoverInstance) -> list[int]:
    """Every assignment with exactly one true variable per clause, ascending."""
    if instance.n_vars > MAX_VARS:
        raise ResourceLimitError(f"brute force capped at {MAX_VARS} variables")
    ok = np.ones(1 << instance.n_vars, dtype=bool)
    idx = np.arange(1 << instance.n_vars, dtype=np.int64)
    for i, j, k in instance.clauses:
        ok &= ((idx >> i) & 1) + ((idx >> j) & 1) + ((idx >> k) & 1) == 1
    return np.flatnonzero(ok).tolist()


@dataclass(frozen=True)
class ProfilePoint:
    s: float
    gap: float
    numerator: float
    ratio: float
    degenerate: bool


@dataclass
class AdiabaticProfile:
    points: list[ProfilePoint]

    @property
    def max_ratio(self) -> float:
        return max(p.ratio for p in self.points)

    @property
    def min_gap(self) -> ProfilePoint:
        return min(self.points, key=lambda p: p.gap)


def adiabatic_error_profile(
    h0: PauliHamiltonian, hp: PauliHamiltonian, grid
) -> AdiabaticProfile:
    """Gap, transition matrix element of ``hp - h0`` and their ratio on ``grid``.

    The ratio is |<psi_1|(hp - h0)|psi_0>| / gap**2. Points whose gap falls
    below 1e-9 are flagged and carry an infinite ratio.
    """
    if h0.n_qubits != hp.n_qubits:
        raise DomainError(f"qubit count mismatch: {h0.n_qubits} vs {hp.n_qubits}")
    if h0.n_qubits > PROFILE_MAX_QUBITS:
        raise ResourceLimitError(f"profiles capped at {PROFILE_MAX_QUBITS} qubits")
    dh = hp - h0
    points = []
    for s in grid:
        s = float(s)
        report = exact_spectrum(interpolate(h0, hp, s), 2)
        gap = report.gap
        numerator = float(abs(np.vdot(report.first_excited, dh.apply(report.ground_state))))
        degenerate = gap < DEGENERATE_GAP
        ratio = float("inf") if degenerate else numerator / gap**2
        points.append(ProfilePoint(s, gap, numerator, ratio, degenerate))
    return AdiabaticProfile(points)


def operator_norm(h: PauliHamiltonian) -> float:
    """Spectral norm from the dense matrix."""
    vals = np.linalg.eigvalsh(to_dense(h))
    return float(max(abs(vals[0]), abs(vals[-1])))

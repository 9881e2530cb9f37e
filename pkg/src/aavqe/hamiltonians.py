"""Pauli-string Hamiltonians and the builders used by the experiments.

A Pauli string is stored as an axis label per qubit, ``axes[q]`` acting on
qubit ``q``. Hamiltonians are immutable; arithmetic returns new objects with
duplicate strings merged and negligible coefficients dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Iterable

import numpy as np

from .errors import DomainError, ResourceLimitError
from .simulator import MAX_QUBITS, StateVector

if TYPE_CHECKING:
    from .problems import ExactCoverInstance

DENSE_MAX_QUBITS = 14
COEFF_CUTOFF = 1e-12
AXES = frozenset("IXYZ")


@dataclass(frozen=True)
class PauliString:
    axes: str
    coefficient: float

    def __post_init__(self):
        axes = self.axes.upper()
        if not axes or set(axes) - AXES:
            raise DomainError(f"invalid Pauli axes {self.axes!r}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "coefficient", float(self.coefficient))

    @property
    def n_qubits(self) -> int:
        return len(self.axes)

    @property
    def is_identity(self) -> bool:
        return set(self.axes) == {"I"}

    @property
    def is_diagonal(self) -> bool:
        return set(self.axes) <= {"I", "Z"}

    @property
    def flip_mask(self) -> int:
        return sum(1 << q for q, a in enumerate(self.axes) if a in "XY")

    @property
    def phase_mask(self) -> int:
        return sum(1 << q for q, a in enumerate(self.axes) if a in "ZY")

    @property
    def support_mask(self) -> int:
        return sum(1 << q for q, a in enumerate(self.axes) if a != "I")

    @classmethod
    def single(cls, n_qubits: int, ops: dict[int, str], coefficient: float = 1.0) -> PauliString:
        """Build a string from a sparse ``{qubit: axis}`` mapping."""
        axes = ["I"] * n_qubits
        for q, a in ops.items():
            if not 0 <= q < n_qubits:
                raise DomainError(f"qubit {q} out of range for {n_qubits} qubits")
            axes[q] = a
        return cls("".join(axes), coefficient)


@dataclass(frozen=True)
class _FlipGroup:
    flip_mask: int
    flip_axes: tuple[int, ...]
    weights: np.ndarray  # weights[j] multiplies psi[j ^ flip_mask] in (H psi)[j]


def _signs(n_qubits: int, mask: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    return 1.0 - 2.0 * (np.bitwise_count(idx & mask) & 1)


class PauliHamiltonian:
    """Weighted sum of Pauli strings plus a constant offset.

    Terms are kept sorted by their axes label so two Hamiltonians with the
    same content compare equal regardless of how they were assembled.
    """

    __slots__ = ("n_qubits", "terms", "constant", "__dict__")

    def __init__(self, n_qubits: int, terms: Iterable[PauliString] = (), constant: float = 0.0):
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise DomainError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
        merged: dict[str, float] = {}
        constant = float(constant)
        for term in terms:
            if term.n_qubits != n_qubits:
                raise DomainError(f"term {term.axes} does not act on {n_qubits} qubits")
            if term.is_identity:
                constant += term.coefficient
            else:
                merged[term.axes] = merged.get(term.axes, 0.0) + term.coefficient
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(
            self,
            "terms",
            tuple(
                PauliString(axes, c)
                for axes, c in sorted(merged.items())
                if abs(c) >= COEFF_CUTOFF
            ),
        )
        object.__setattr__(self, "constant", constant)

    def __setattr__(self, name, value):
        raise AttributeError("PauliHamiltonian is immutable")

    def __repr__(self) -> str:
        body = " + ".join(f"{t.coefficient:g}*{t.axes}" for t in self.terms)
        return f"PauliHamiltonian(n_qubits={self.n_qubits}, {body or '0'}, constant={self.constant:g})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliHamiltonian):
            return NotImplemented
        return (
            self.n_qubits == other.n_qubits
            and self.terms == other.terms
            and self.constant == other.constant
        )

    def __hash__(self) -> int:
        return hash((self.n_qubits, self.terms, self.constant))

    def __add__(self, other: PauliHamiltonian) -> PauliHamiltonian:
        if not isinstance(other, PauliHamiltonian):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise DomainError(f"qubit count mismatch: {self.n_qubits} vs {other.n_qubits}")
        return PauliHamiltonian(
            self.n_qubits, self.terms + other.terms, self.constant + other.constant
        )

    def __mul__(self, factor: float) -> PauliHamiltonian:
        factor = float(factor)
        return PauliHamiltonian(
            self.n_qubits,
            (PauliString(t.axes, factor * t.coefficient) for t in self.terms),
            factor * self.constant,
        )

    __rmul__ = __mul__

    def __sub__(self, other: PauliHamiltonian) -> PauliHamiltonian:
        return self + (-1.0) * other

    @property
    def is_diagonal(self) -> bool:
        return all(t.is_diagonal for t in self.terms)

    @cached_property
    def diagonal_part(self) -> np.ndarray:
        """Diagonal of the Z-only terms, without the constant."""
        diag = np.zeros(1 << self.n_qubits)
        for t in self.terms:
            if t.is_diagonal:
                diag += t.coefficient * _signs(self.n_qubits, t.phase_mask)
        return diag

    @cached_property
    def flip_groups(self) -> tuple[_FlipGroup, ...]:
        """Off-diagonal terms grouped by the bits they flip."""
        n = self.n_qubits
        groups: dict[int, np.ndarray] = {}
        idx = np.arange(1 << n, dtype=np.int64)
        for t in self.terms:
            if t.is_diagonal:
                continue
            x = t.flip_mask
            n_y = t.axes.count("Y")
            # P|b> = i^{nY} (-1)^{popcount(b & z)} |b ^ x>, evaluated at b = j ^ x
            parity = np.bitwise_count((idx ^ x) & t.phase_mask) & 1
            w = (1j**n_y) * t.coefficient * (1.0 - 2.0 * parity)
            groups[x] = groups.get(x, 0) + w
        out = []
        for x, w in groups.items():
            w = np.asarray(w)
            if np.all(w.imag == 0):
                w = w.real.copy()
            axes = tuple(n - 1 - q for q in range(n) if (x >> q) & 1)
            out.append(_FlipGroup(x, axes, w))
        return tuple(out)

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """Return H applied to a flat amplitude array."""
        n = self.n_qubits
        out = (self.diagonal_part + self.constant) * amplitudes
        tensor = amplitudes.reshape((2,) * n)
        for g in self.flip_groups:
            out = out + g.weights * np.flip(tensor, axis=g.flip_axes).reshape(-1)
        return out

    def expectation(self, amplitudes: np.ndarray) -> float:
        probs = amplitudes.real**2 + amplitudes.imag**2
        value = self.constant + float(np.dot(self.diagonal_part, probs))
        if self.flip_groups:
            tensor = amplitudes.reshape((2,) * self.n_qubits)
            conj = amplitudes.conj()
            for g in self.flip_groups:
                flipped = np.flip(tensor, axis=g.flip_axes).reshape(-1)
                value += float(np.sum(conj * g.weights * flipped).real)
        return value


def to_dense(h: PauliHamiltonian) -> np.ndarray:
    """Dense matrix of ``h``; capped at 14 qubits."""
    n = h.n_qubits
    if n > DENSE_MAX_QUBITS:
        raise ResourceLimitError(f"dense matrix capped at {DENSE_MAX_QUBITS} qubits, got {n}")
    dim = 1 << n
    dtype = float if all(np.isrealobj(g.weights) for g in h.flip_groups) else complex
    mat = np.zeros((dim, dim), dtype=dtype)
    rows = np.arange(dim)
    mat[rows, rows] = h.diagonal_part + h.constant
    for g in h.flip_groups:
        mat[rows, rows ^ g.flip_mask] += g.weights
    return mat


def build_driver(n_qubits: int) -> PauliHamiltonian:
    """Transverse driver: one +X term per qubit."""
    if n_qubits < 1:
        raise DomainError(f"n_qubits must be >= 1, got {n_qubits}")
    return PauliHamiltonian(
        n_qubits, (PauliString.single(n_qubits, {q: "X"}) for q in range(n_qubits))
    )


@dataclass(frozen=True)
class ChainSpec:
    n_qubits: int
    lam: float = 1.0
    coupling_axis: str = "X"
    field_axis: str = "X"
    periodic: bool = False

    def __post_init__(self):
        if self.n_qubits < 2:
            raise DomainError(f"chain needs at least 2 qubits, got {self.n_qubits}")
        for name in ("coupling_axis", "field_axis"):
            value = getattr(self, name).upper()
            if value not in ("X", "Z"):
                raise DomainError(f"{name} must be X or Z, got {value!r}")
            object.__setattr__(self, name, value)


def build_chain(spec: ChainSpec) -> PauliHamiltonian:
    """Nearest-neighbour coupling plus a uniform field of strength ``lam``."""
    n, a, b = spec.n_qubits, spec.coupling_axis, spec.field_axis
    bonds = [(i, i + 1) for i in range(n - 1)]
    if spec.periodic and n > 2:
        bonds.append((n - 1, 0))
    terms = [PauliString.single(n, {i: a, j: a}) for i, j in bonds]
    terms += [PauliString.single(n, {i: b}, spec.lam) for i in range(n)]
    return PauliHamiltonian(n, terms)


def build_exact_cover(instance: ExactCoverInstance) -> PauliHamiltonian:
    """Clause penalty sum of (n_i + n_j + n_k - 1)^2 with n = (1 - Z)/2.

    Each clause expands to 1 - (Z_i + Z_j + Z_k)/2 + (Z_iZ_j + Z_iZ_k + Z_jZ_k)/2,
    so the returned operator is diagonal and carries its constant explicitly.
    """
    n = instance.n_vars
    terms = []
    constant = 0.0
    for i, j, k in instance.clauses:
        constant += 1.0
        terms += [PauliString.single(n, {q: "Z"}, -0.5) for q in (i, j, k)]
        terms += [PauliString.single(n, {p: "Z", q: "Z"}, 0.5) for p, q in ((i, j), (i, k), (j, k))]
    return PauliHamiltonian(n, terms, constant)


def interpolate(h0: PauliHamiltonian, hp: PauliHamiltonian, s: float) -> PauliHamiltonian:
    """Linear interpolation ``(1 - s) h0 + s hp``."""
    if h0.n_qubits != hp.n_qubits:
        raise DomainError(f"qubit count mismatch: {h0.n_qubits} vs {hp.n_qubits}")
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"s must lie in [0, 1], got {s}")
    return (1.0 - s) * h0 + s * hp


def expectation(state: StateVector, h: PauliHamiltonian) -> float:
    if state.n_qubits != h.n_qubits:
        raise DomainError(f"state has {state.n_qubits} qubits, Hamiltonian {h.n_qubits}")
    return h.expectation(state.amplitudes)

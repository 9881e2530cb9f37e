"""EXACT COVER instances: evaluation, hard-instance generation and file I/O.

Instance files are plain text::

    c optional comment
    p ec <n_vars> <n_clauses>
    0 1 2
    ...

one clause of three distinct zero-based variable indices per line.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .errors import DomainError, GenerationError, ParseError

log = logging.getLogger(__name__)

MIN_GEN_VARS = 4
MAX_VARS = 24


@dataclass(frozen=True)
class ExactCoverInstance:
    n_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if not 3 <= self.n_vars <= MAX_VARS:
            raise DomainError(f"n_vars must be in [3, {MAX_VARS}], got {self.n_vars}")
        normalized = []
        for clause in self.clauses:
            if len(clause) != 3:
                raise DomainError(f"clause {clause} is not a triple")
            c = tuple(sorted(int(v) for v in clause))
            if len(set(c)) != 3:
                raise DomainError(f"clause {clause} repeats a variable")
            if c[0] < 0 or c[2] >= self.n_vars:
                raise DomainError(f"clause {clause} has an index outside [0, {self.n_vars})")
            normalized.append(c)
        if len(set(normalized)) != len(normalized):
            raise DomainError("duplicate clauses")
        object.__setattr__(self, "clauses", tuple(normalized))

    @property
    def clause_masks(self) -> list[int]:
        return [(1 << i) | (1 << j) | (1 << k) for i, j, k in self.clauses]


@dataclass(frozen=True)
class HardnessReport:
    solution_count: int
    solution: int | None
    n_clauses: int
    min_gap: float | None = None
    min_gap_s: float | None = None


def evaluate(instance: ExactCoverInstance, assignment: int) -> int:
    """Penalty sum of (t - 1)^2 over clauses, t = true variables in the clause."""
    if not 0 <= assignment < (1 << instance.n_vars):
        raise DomainError(f"assignment {assignment} out of range")
    return sum((int(assignment & m).bit_count() - 1) ** 2 for m in instance.clause_masks)


def penalty_table(instance: ExactCoverInstance) -> np.ndarray:
    """Penalty of every assignment, indexed by the assignment integer."""
    idx = np.arange(1 << instance.n_vars, dtype=np.int64)
    total = np.zeros(len(idx), dtype=np.int32)
    for m in instance.clause_masks:
        t = np.bitwise_count(idx & m).astype(np.int32)
        total += (t - 1) ** 2
    return total


def is_solution(instance: ExactCoverInstance, assignment: int) -> bool:
    return all(int(assignment & m).bit_count() == 1 for m in instance.clause_masks)


def _filter_one_hot(candidates: np.ndarray, mask: int) -> np.ndarray:
    return candidates[np.bitwise_count(candidates & mask) == 1]


def generate_hard_instance(
    n_vars: int,
    rng_seed: int,
    max_attempts: int = 10_000,
    max_min_gap: float | None = None,
) -> tuple[ExactCoverInstance, HardnessReport]:
    """Grow a random clause set until exactly one assignment satisfies it.

    Clauses are drawn uniformly from the unused triples. A clause that would
    leave no solution is rejected and another is drawn. Each rejection costs
    one attempt; if every remaining triple is rejected the clause set is
    discarded and growth restarts. With ``max_min_gap`` set (``n_vars <= 12``)
    a unique-solution instance is also rejected unless its minimum spectral
    gap along the driver interpolation is at most that value.
    """
    if not MIN_GEN_VARS <= n_vars <= MAX_VARS:
        raise DomainError(f"n_vars must be in [{MIN_GEN_VARS}, {MAX_VARS}], got {n_vars}")
    if max_min_gap is not None and n_vars > 12:
        raise DomainError("gap filtering is limited to n_vars <= 12")
    rng = np.random.default_rng(rng_seed)
    all_triples = list(combinations(range(n_vars), 3))
    attempts = 0
    while attempts < max_attempts:
        clauses: list[tuple[int, int, int]] = []
        candidates = np.arange(1 << n_vars, dtype=np.int64)
        order = rng.permutation(len(all_triples))
        for t in order:
            triple = all_triples[t]
            m = (1 << triple[0]) | (1 << triple[1]) | (1 << triple[2])
            kept = _filter_one_hot(candidates, m)
            if kept.size == 0:
                attempts += 1
                if attempts >= max_attempts:
                    break
                continue
            clauses.append(triple)
            candidates = kept
            if candidates.size == 1:
                break
        if candidates.size != 1:
            attempts += 1
            continue
        instance = ExactCoverInstance(n_vars, tuple(clauses))
        report = HardnessReport(1, int(candidates[0]), len(clauses))
        if not n_vars / 3 <= len(clauses) <= 2 * n_vars:
            log.warning("clause count %d outside sanity band for n_vars=%d", len(clauses), n_vars)
        if max_min_gap is not None:
            from .hamiltonians import build_driver, build_exact_cover
            from .oracle import adiabatic_error_profile

            profile = adiabatic_error_profile(
                build_driver(n_vars), build_exact_cover(instance), np.linspace(0, 1, 101)
            )
            best = min(profile.points, key=lambda p: p.gap)
            report = HardnessReport(1, report.solution, len(clauses), best.gap, best.s)
            if best.gap > max_min_gap:
                attempts += 1
                continue
        return instance, report
    raise GenerationError(
        f"no unique-solution instance for n_vars={n_vars}, seed={rng_seed} "
        f"after {max_attempts} attempts"
    )


def serialize_instance(instance: ExactCoverInstance, comments: list[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p ec {instance.n_vars} {len(instance.clauses)}")
    lines += [" ".join(map(str, c)) for c in instance.clauses]
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> ExactCoverInstance:
    n_vars = n_clauses = None
    clauses: list[tuple[int, int, int]] = []
    seen: set[tuple[int, ...]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        if fields[0] == "p":
            if n_vars is not None:
                raise ParseError("duplicate header", lineno)
            if len(fields) != 4 or fields[1] != "ec":
                raise ParseError(f"malformed header {line!r}", lineno)
            try:
                n_vars, n_clauses = int(fields[2]), int(fields[3])
            except ValueError:
                raise ParseError(f"malformed header {line!r}", lineno) from None
            if not 3 <= n_vars <= MAX_VARS or n_clauses < 0:
                raise ParseError(f"header values out of range: {line!r}", lineno)
            continue
        if n_vars is None:
            raise ParseError("clause before header", lineno)
        if len(fields) != 3:
            raise ParseError(f"clause must have 3 indices, got {len(fields)}", lineno)
        try:
            clause = tuple(int(f) for f in fields)
        except ValueError:
            raise ParseError(f"non-integer index in {line!r}", lineno) from None
        if len(set(clause)) != 3:
            raise ParseError(f"duplicate index in clause {line!r}", lineno)
        if min(clause) < 0 or max(clause) >= n_vars:
            raise ParseError(f"index out of range [0, {n_vars}) in {line!r}", lineno)
        key = tuple(sorted(clause))
        if key in seen:
            raise ParseError(f"duplicate clause {line!r}", lineno)
        seen.add(key)
        clauses.append(key)
    if n_vars is None:
        raise ParseError("missing 'p ec' header")
    if len(clauses) != n_clauses:
        raise ParseError(f"header declares {n_clauses} clauses, found {len(clauses)}")
    return ExactCoverInstance(n_vars, tuple(clauses))


def load_instance(path) -> ExactCoverInstance:
    return parse_instance(Path(path).read_text())


def save_instance(instance: ExactCoverInstance, path, comments: list[str] = ()) -> None:
    Path(path).write_text(serialize_instance(instance, comments))

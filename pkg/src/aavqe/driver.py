"""VQE and adiabatically assisted VQE orchestration."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import seeding
from .ansatz import AnsatzSpec, check_parameters, prepare_state, random_parameters
from .errors import DomainError
from .estimator import EXACT, MeasurementPlan, ShotBudget, detect_solution
from .hamiltonians import DENSE_MAX_QUBITS, PauliHamiltonian, interpolate
from .optim import OptTrace, SpsaConfig, minimize
from .problems import ExactCoverInstance
from .simulator import DEFAULT_SEED, StateVector

log = logging.getLogger(__name__)

EXACT_TRACE_MAX_QUBITS = DENSE_MAX_QUBITS


class EnergyObjective:
    """Energy of the ansatz state, exact or estimated from shots.

    With an EXACT COVER ``instance`` and a finite budget, every batch of
    computational-basis samples is checked for a satisfying assignment; the
    first one found is kept in ``solution``.
    """

    def __init__(
        self,
        h: PauliHamiltonian,
        spec: AnsatzSpec,
        budget: ShotBudget = EXACT,
        rng_seed=DEFAULT_SEED,
        instance: ExactCoverInstance | None = None,
    ):
        if h.n_qubits != spec.n_qubits:
            raise DomainError(f"Hamiltonian has {h.n_qubits} qubits, ansatz {spec.n_qubits}")
        self.h = h
        self.spec = spec
        self.budget = budget
        self.instance = instance
        self.rng = np.random.default_rng(rng_seed)
        self.plan = None if budget.is_exact else MeasurementPlan(h)
        self.calls = 0
        self.last_state: StateVector | None = None
        self.solution: int | None = None

    def __call__(self, theta) -> float:
        self.calls += 1
        state = prepare_state(self.spec, theta)
        self.last_state = state
        if self.plan is None:
            return self.h.expectation(state.amplitudes)
        energy, samples = self.plan.estimate(state, self.budget.shots_per_group, self.rng)
        if self.instance is not None and self.solution is None and samples is not None:
            self.solution = detect_solution(samples, self.instance)
        return energy


@dataclass
class VqeResult:
    trace: OptTrace
    state: StateVector
    exact_energies: list[float] = field(default_factory=list)
    solution: int | None = None
    solution_iteration: int | None = None

    def __iter__(self):
        # unpacks as (trace, state)
        return iter((self.trace, self.state))


def run_vqe(
    h: PauliHamiltonian,
    spec: AnsatzSpec,
    theta0,
    opt: SpsaConfig,
    budget: ShotBudget = EXACT,
    shot_seed=None,
    instance: ExactCoverInstance | None = None,
) -> VqeResult:
    """Minimize the energy of ``h`` over the ansatz parameters with SPSA.

    ``shot_seed`` seeds measurement sampling (defaults to a stream derived
    from ``opt.rng_seed``). Unpacks as ``(trace, state)``.
    """
    theta0 = check_parameters(spec, theta0)
    if shot_seed is None:
        shot_seed = seeding.derive_seed(opt.rng_seed, seeding.SHOTS)
    objective = EnergyObjective(h, spec, budget, shot_seed, instance)
    exact_energies: list[float] = []
    hit: list[int] = []
    track_exact = h.n_qubits <= EXACT_TRACE_MAX_QUBITS

    def on_iteration(k, theta, value):
        if track_exact:
            exact_energies.append(
                value if budget.is_exact else h.expectation(objective.last_state.amplitudes)
            )
        if objective.solution is not None and not hit:
            hit.append(k)

    trace = minimize(theta0, objective, opt, callback=on_iteration)
    if trace.failed:
        log.warning("VQE optimization failed: %s", trace.message)
    state = prepare_state(spec, trace.final_parameters)
    return VqeResult(
        trace,
        state,
        exact_energies,
        objective.solution,
        hit[0] if hit else None,
    )


@dataclass(frozen=True)
class ScheduleConfig:
    """Interpolation grid and per-step budget.

    The default grid is linear, s_i = i * delta_s with the last point clamped
    to 1. An explicit monotone ``grid`` from 0 to 1 overrides it.
    """

    delta_s: float = 0.05
    iterations_per_step: int = 100
    budget: ShotBudget = EXACT
    master_seed: int = DEFAULT_SEED
    grid: tuple[float, ...] | None = None
    retry: bool = True
    retry_oracle_max_qubits: int = 10
    stop_at_first_solution: bool = False

    def __post_init__(self):
        if not 0 < self.delta_s <= 1:
            raise DomainError(f"delta_s must be in (0, 1], got {self.delta_s}")
        if self.iterations_per_step < 1:
            raise DomainError("iterations_per_step must be >= 1")
        if self.grid is not None:
            g = tuple(float(x) for x in self.grid)
            if len(g) < 2 or g[0] != 0.0 or g[-1] != 1.0:
                raise DomainError("grid must start at 0 and end at 1")
            if any(b <= a for a, b in zip(g, g[1:])):
                raise DomainError("grid must be strictly increasing")
            object.__setattr__(self, "grid", g)

    @property
    def steps(self) -> int:
        if self.grid is not None:
            return len(self.grid) - 1
        # tolerance keeps 1/0.05 from rounding up to 21 steps
        return math.ceil(1.0 / self.delta_s - 1e-9)

    @property
    def s_values(self) -> list[float]:
        if self.grid is not None:
            return list(self.grid)
        t = self.steps
        return [min(i * self.delta_s, 1.0) for i in range(t)] + [1.0]


@dataclass
class StepRecord:
    s: float
    trace: OptTrace
    final_energy_exact: float
    final_energy_sampled: float | None
    exact_energies: list[float]
    solution: int | None = None
    solution_iteration: int | None = None
    retried: bool = False


@dataclass
class RunRecord:
    steps: list[StepRecord]
    final_parameters: np.ndarray
    final_bitstring: int
    master_seed: int
    wall_clock: float = 0.0

    @property
    def final_energy(self) -> float:
        return self.steps[-1].final_energy_exact

    @property
    def first_solution_step(self) -> StepRecord | None:
        return next((st for st in self.steps if st.solution is not None), None)

    @property
    def first_solution_s(self) -> float | None:
        step = self.first_solution_step
        return None if step is None else step.s


def _step_gap(h0, hp, s) -> float:
    from .oracle import exact_spectrum

    return exact_spectrum(interpolate(h0, hp, s), 2).gap


def run_aavqe(
    h0: PauliHamiltonian,
    hp: PauliHamiltonian,
    spec: AnsatzSpec,
    schedule: ScheduleConfig,
    opt: SpsaConfig | None = None,
    instance: ExactCoverInstance | None = None,
    theta0=None,
) -> RunRecord:
    """Solve H(s) = (1 - s) h0 + s hp on the schedule grid, warm-starting each VQE.

    The first VQE (s = 0) starts from random parameters unless ``theta0`` is
    given; each later one starts from the previous step's final parameters.
    When a step ends more than half the previous step's exact gap above the
    previous final energy, it is rerun once from the same start with a fresh
    perturbation seed and the better of the two runs is kept (exact gaps are
    only computed up to ``retry_oracle_max_qubits``).

    With ``opt.a`` unset, the SPSA gain is calibrated on the s = 0 step and
    reused for every later step.
    """
    if h0.n_qubits != hp.n_qubits or h0.n_qubits != spec.n_qubits:
        raise DomainError("h0, hp and the ansatz must act on the same number of qubits")
    opt = opt or SpsaConfig()
    opt = replace(opt, max_iterations=schedule.iterations_per_step)
    master = schedule.master_seed
    budget = schedule.budget
    if theta0 is None:
        theta = random_parameters(spec, seeding.derive_seed(master, seeding.INIT))
    else:
        theta = check_parameters(spec, theta0).copy()
    start = time.perf_counter()
    steps: list[StepRecord] = []
    can_retry = schedule.retry and spec.n_qubits <= schedule.retry_oracle_max_qubits
    for i, s in enumerate(schedule.s_values):
        h = interpolate(h0, hp, s)

        def attempt(stream, theta=theta, i=i, h=h):
            step_opt = replace(opt, rng_seed=seeding.derive_seed(master, stream, i))
            return run_vqe(
                h, spec, theta, step_opt, budget,
                shot_seed=seeding.derive_seed(master, seeding.SHOTS, stream, i),
                instance=instance,
            )

        result = attempt(seeding.SPSA)
        retried = False
        if can_retry and steps and result.trace.values:
            prev = steps[-1]
            threshold = prev.trace.final_value + 0.5 * _step_gap(h0, hp, prev.s)
            if result.trace.final_value > threshold:
                retried = True
                second = attempt(seeding.RETRY)
                if second.trace.values and second.trace.final_value < result.trace.final_value:
                    result = second
        if result.trace.values:
            theta = result.trace.final_parameters
        if opt.a is None and result.trace.step_gain is not None:
            # gain is calibrated once, from the random start, then held fixed
            opt = replace(opt, a=result.trace.step_gain)
        steps.append(
            StepRecord(
                s=s,
                trace=result.trace,
                final_energy_exact=h.expectation(result.state.amplitudes),
                final_energy_sampled=None if budget.is_exact or not result.trace.values
                else result.trace.final_value,
                exact_energies=result.exact_energies,
                solution=result.solution,
                solution_iteration=result.solution_iteration,
                retried=retried,
            )
        )
        if schedule.stop_at_first_solution and result.solution is not None:
            break
    final_state = prepare_state(spec, theta)
    return RunRecord(
        steps=steps,
        final_parameters=np.array(theta),
        final_bitstring=int(np.argmax(final_state.probabilities())),
        master_seed=master,
        wall_clock=time.perf_counter() - start,
    )


@dataclass
class FirstSolutionHistogram:
    s_values: list[float]
    counts: list[int]
    overflow: int

    @property
    def total(self) -> int:
        return sum(self.counts) + self.overflow

    def fraction_at_or_below(self, s_max: float) -> float:
        hits = sum(c for s, c in zip(self.s_values, self.counts) if s <= s_max + 1e-12)
        return hits / self.total if self.total else 0.0


def first_solution_statistics(records: list[RunRecord], s_values=None) -> FirstSolutionHistogram:
    """Histogram of the smallest s at which each run sampled a solution."""
    if s_values is None:
        s_values = sorted({st.s for r in records for st in r.steps})
    s_values = list(s_values)
    counts = [0] * len(s_values)
    overflow = 0
    for record in records:
        s = record.first_solution_s
        if s is None:
            overflow += 1
            continue
        # nearest grid bin; records share the grid so this is an exact match
        counts[int(np.argmin([abs(s - g) for g in s_values]))] += 1
    return FirstSolutionHistogram(s_values, counts, overflow)

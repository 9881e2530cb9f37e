"""Simultaneous-perturbation stochastic approximation (SPSA)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import DomainError, OptimizationError
from .simulator import DEFAULT_SEED

Objective = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class SpsaConfig:
    """Gain sequences a_k = a / (A + k + 1)**alpha and c_k = c / (k + 1)**gamma.

    ``a=None`` calibrates the step gain from ``calibration_evals`` objective
    calls at the starting point so the first update moves each coordinate by
    about ``target_step`` radians. ``big_a=None`` means ``0.1 * max_iterations``.
    """

    a: float | None = None
    c: float = 0.1
    big_a: float | None = None
    alpha: float = 0.602
    gamma: float = 0.101
    max_iterations: int = 100
    convergence_window: int = 50
    convergence_tol: float = 1e-4
    rng_seed: int = DEFAULT_SEED
    target_step: float = 0.1
    calibration_evals: int = 10

    def __post_init__(self):
        if self.a is not None and self.a <= 0:
            raise DomainError(f"a must be positive, got {self.a}")
        if self.c <= 0:
            raise DomainError(f"c must be positive, got {self.c}")
        if not 0 < self.gamma < self.alpha <= 1:
            raise DomainError(f"need 0 < gamma < alpha <= 1, got {self.gamma}, {self.alpha}")
        if self.max_iterations < 1:
            raise DomainError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.convergence_window < 1:
            raise DomainError("convergence_window must be >= 1")
        if self.calibration_evals < 2 or self.calibration_evals % 2:
            raise DomainError("calibration_evals must be a positive even number")

    @property
    def stability(self) -> float:
        return 0.1 * self.max_iterations if self.big_a is None else self.big_a

    def step_gain(self, k: int) -> float:
        if self.a is None:
            raise DomainError("step gain 'a' is not set; calibrate first")
        return self.a / (self.stability + k + 1) ** self.alpha

    def perturbation(self, k: int) -> float:
        return self.c / (k + 1) ** self.gamma


@dataclass
class OptTrace:
    values: list[float] = field(default_factory=list)
    parameters: list[np.ndarray] | None = None
    final_parameters: np.ndarray | None = None
    n_evaluations: int = 0
    calibration_evaluations: int = 0
    step_gain: float | None = None
    converged: bool = False
    failed: bool = False
    message: str = ""

    @property
    def iterations(self) -> int:
        return len(self.values)

    @property
    def final_value(self) -> float:
        return self.values[-1]


class _Counted:
    def __init__(self, fn: Objective):
        self.fn = fn
        self.calls = 0

    def __call__(self, theta: np.ndarray) -> float:
        self.calls += 1
        value = float(self.fn(theta))
        if not math.isfinite(value):
            raise OptimizationError(f"objective returned {value}")
        return value


def rademacher(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.integers(0, 2, dim) * 2.0 - 1.0


def gradient_estimate(
    theta: np.ndarray, objective: Objective, ck: float, delta: np.ndarray
) -> np.ndarray:
    """Two-sided simultaneous-perturbation gradient along ``delta``."""
    f_plus = float(objective(theta + ck * delta))
    f_minus = float(objective(theta - ck * delta))
    if not (math.isfinite(f_plus) and math.isfinite(f_minus)):
        raise OptimizationError(f"objective returned {f_plus}, {f_minus}")
    # delta entries are +-1, so dividing by delta is multiplying by it
    return (f_plus - f_minus) / (2.0 * ck) * delta


def spsa_gradient_step(
    theta, objective: Objective, k: int, config: SpsaConfig, rng=None
) -> np.ndarray:
    """One SPSA update from ``theta``; exactly two objective calls."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    theta = np.asarray(theta, dtype=float)
    rng = np.random.default_rng(config.rng_seed + k if rng is None else rng)
    delta = rademacher(rng, theta.size)
    g = gradient_estimate(theta, objective, config.perturbation(k), delta)
    return theta - config.step_gain(k) * g


def calibrate_gain(
    theta0: np.ndarray, objective: Objective, config: SpsaConfig, rng: np.random.Generator
) -> float:
    """Step gain giving a first update of about ``target_step`` per coordinate."""
    magnitudes = []
    for _ in range(config.calibration_evals // 2):
        delta = rademacher(rng, theta0.size)
        g = gradient_estimate(theta0, objective, config.c, delta)
        magnitudes.append(abs(g[0]))
    mean = float(np.mean(magnitudes))
    scale = config.target_step * (config.stability + 1) ** config.alpha
    return scale / mean if mean > 0 else scale


def minimize(
    theta0,
    objective: Objective,
    config: SpsaConfig,
    callback: Callable[[int, np.ndarray, float], None] | None = None,
    record_parameters: bool = False,
) -> OptTrace:
    """Run SPSA from ``theta0``.

    Iteration ``k`` records ``objective(theta_k)`` and, unless it is the last
    one, takes an SPSA step. The run stops after ``max_iterations`` records or
    once the best recorded value has improved by less than ``convergence_tol``
    over the last ``convergence_window`` updates. A non-finite objective value
    ends the run with ``failed=True`` and the partial trace.
    """
    theta = np.array(theta0, dtype=float)
    fn = _Counted(objective)
    rng = np.random.default_rng(config.rng_seed)
    trace = OptTrace(parameters=[] if record_parameters else None, final_parameters=theta.copy())
    best: list[float] = []
    try:
        if config.a is None:
            config = replace(config, a=calibrate_gain(theta, fn, config, rng))
            trace.calibration_evaluations = fn.calls
        trace.step_gain = config.a
        for k in range(config.max_iterations):
            value = fn(theta)
            trace.values.append(value)
            trace.final_parameters = theta.copy()
            if record_parameters:
                trace.parameters.append(theta.copy())
            best.append(min(value, best[-1]) if best else value)
            if callback is not None:
                callback(k, theta, value)
            w = config.convergence_window
            if k >= w and best[k - w] - best[k] < config.convergence_tol:
                trace.converged = True
                break
            if k == config.max_iterations - 1:
                break
            theta = spsa_gradient_step(theta, fn, k, config, rng)
    except OptimizationError as exc:
        trace.failed = True
        trace.message = str(exc)
    trace.n_evaluations = fn.calls
    return trace

import numpy as np
import pytest

from aavqe.errors import DomainError
from aavqe.estimator import (
    EXACT,
    MeasurementPlan,
    ShotBudget,
    detect_solution,
    expectation_exact,
    expectation_sampled,
)
from aavqe.hamiltonians import (
    ChainSpec,
    PauliHamiltonian,
    PauliString,
    build_chain,
    build_driver,
    build_exact_cover,
)
from aavqe.oracle import brute_force_exact_cover
from aavqe.problems import ExactCoverInstance, generate_hard_instance, is_solution, load_instance
from aavqe.simulator import StateVector, init_basis_state

from conftest import fixture_path, kron_dense, random_state


def _minus_state(n):
    minus = np.array([1, -1]) / np.sqrt(2)
    amps = np.array([1.0])
    for _ in range(n):
        amps = np.kron(minus, amps)
    return StateVector(n, amps)


def test_shot_budget():
    assert ShotBudget().shots_per_group == 1024
    assert ShotBudget.parse("exact") is EXACT and EXACT.is_exact
    assert ShotBudget.parse("256") == ShotBudget(256)
    assert str(ShotBudget(3)) == "3" and str(EXACT) == "exact"
    with pytest.raises(DomainError):
        ShotBudget(0)


def test_exact_examples():
    assert expectation_exact(_minus_state(4), build_driver(4)) == pytest.approx(-4)
    inst = load_instance(fixture_path("ec_n8.ec"))
    assert expectation_exact(init_basis_state(8, 24), build_exact_cover(inst)) == 0


def test_exact_matches_dense(rng):
    h = build_chain(ChainSpec(4, 1.0))
    state = random_state(4, rng)
    quad = np.vdot(state.amplitudes, kron_dense(h) @ state.amplitudes).real
    assert expectation_exact(state, h) == pytest.approx(quad, abs=1e-9)


def test_size_mismatch():
    with pytest.raises(DomainError):
        expectation_exact(init_basis_state(3, 0), build_driver(2))
    with pytest.raises(DomainError):
        expectation_sampled(init_basis_state(3, 0), build_driver(2), ShotBudget(10))
    with pytest.raises(DomainError):
        expectation_sampled(init_basis_state(2, 0), build_driver(2), EXACT)


def test_measurement_groups():
    h = PauliHamiltonian(3, [PauliString("ZZI", 1), PauliString("IZZ", 1), PauliString("XII", 1), PauliString("XYI", 2)])
    plan = MeasurementPlan(h)
    assert plan.n_groups == 3
    assert MeasurementPlan(build_driver(4)).n_groups == 4


def test_diagonal_basis_state_has_no_variance():
    inst = load_instance(fixture_path("ec_n6.ec"))
    h = build_exact_cover(inst)
    for a in (0, 5, 63):
        exact = expectation_exact(init_basis_state(6, a), h)
        for seed in range(3):
            assert expectation_sampled(init_basis_state(6, a), h, ShotBudget(7), seed) == pytest.approx(exact, abs=1e-12)


def test_driver_on_zero_state_is_near_zero():
    e = expectation_sampled(init_basis_state(1, 0), build_driver(1), ShotBudget(10_000), 3)
    assert -0.05 <= e <= 0.05


def test_sampling_is_seeded(rng):
    state = random_state(3, rng)
    h = build_chain(ChainSpec(3, 0.4, "X", "Z"))
    a = expectation_sampled(state, h, ShotBudget(50), 11)
    assert a == expectation_sampled(state, h, ShotBudget(50), 11)
    assert a != expectation_sampled(state, h, ShotBudget(50), 12)


def _random_pair(seed):
    rng = np.random.default_rng(seed)
    n = 3
    terms = [PauliString("".join(rng.choice(list("IXYZ"), n)), rng.normal()) for _ in range(6)]
    return random_state(n, rng), PauliHamiltonian(n, terms, 0.3)


def test_unbiased_over_seeds():
    state, h = _random_pair(1)
    samples = np.array([expectation_sampled(state, h, ShotBudget(64), s) for s in range(200)])
    stderr = samples.std(ddof=1) / np.sqrt(len(samples))
    assert abs(samples.mean() - expectation_exact(state, h)) <= 5 * stderr


def test_shot_noise_scaling():
    state, h = _random_pair(2)
    sd = {
        m: np.std([expectation_sampled(state, h, ShotBudget(m), s) for s in range(200)], ddof=1)
        for m in (100, 1600)
    }
    assert 4 / 1.25 <= sd[100] / sd[1600] <= 4 * 1.25


@pytest.mark.parametrize("axes", ["X", "Y", "Z", "XY", "YY", "ZX", "YZX", "IYI"])
def test_single_pauli_strings(axes):
    rng = np.random.default_rng(len(axes) * 31 + ord(axes[0]))
    n = len(axes)
    state = random_state(n, rng)
    h = PauliHamiltonian(n, [PauliString(axes, 1.0)])
    est = expectation_sampled(state, h, ShotBudget(100_000), 5)
    assert est == pytest.approx(expectation_exact(state, h), abs=0.02)


def test_y_eigenstates():
    plus_i = StateVector(1, np.array([1, 1j]) / np.sqrt(2))
    h = PauliHamiltonian(1, [PauliString("Y", 1.0)])
    assert expectation_sampled(plus_i, h, ShotBudget(100), 0) == 1.0


def test_detect_solution_examples():
    single = ExactCoverInstance(3, ((0, 1, 2),))
    assert detect_solution([7, 1], single) == 1
    assert detect_solution([7, 0, 3], single) is None
    assert detect_solution([], single) is None
    inst = load_instance(fixture_path("ec_n8.ec"))
    assert detect_solution([0, 255, 24, 3], inst) == 24


def test_detect_solution_matches_brute_force():
    rng = np.random.default_rng(9)
    for trial in range(1000):
        n = int(rng.integers(4, 11))
        if trial % 2:
            inst, _ = generate_hard_instance(n, int(rng.integers(1 << 30)))
        else:
            triples = {tuple(sorted(rng.choice(n, 3, replace=False))) for _ in range(3)}
            inst = ExactCoverInstance(n, tuple(triples))
        solutions = brute_force_exact_cover(inst)
        samples = rng.integers(0, 1 << n, 5)
        if solutions and trial % 3 == 0:
            samples[3] = solutions[0]
        expected = next((int(s) for s in samples if int(s) in solutions), None)
        assert detect_solution(samples, inst) == expected
        if expected is not None:
            assert is_solution(inst, expected)

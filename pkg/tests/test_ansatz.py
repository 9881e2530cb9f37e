import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aavqe.ansatz import AnsatzSpec, prepare_state, random_parameters
from aavqe.errors import DomainError
from aavqe.hamiltonians import ChainSpec, build_chain, build_driver
from aavqe.simulator import apply_circuit, init_basis_state

from conftest import kron_dense


def test_parameter_count():
    assert AnsatzSpec(4, 2).parameter_count == 24
    assert len(random_parameters(AnsatzSpec(4, 2), 0)) == 24
    assert AnsatzSpec(3, 0).parameter_count == 6


def test_spec_validation():
    for args in [(0, 1), (2, -1)]:
        with pytest.raises(DomainError):
            AnsatzSpec(*args)
    with pytest.raises(DomainError):
        AnsatzSpec(2, 1, "CNOT_ring")


def test_length_mismatch():
    with pytest.raises(DomainError):
        prepare_state(AnsatzSpec(2, 1), np.zeros(7))


def test_cz_ladder_order():
    assert AnsatzSpec(5).cz_pairs == [(0, 1), (2, 3), (1, 2), (3, 4)]
    assert AnsatzSpec(1).cz_pairs == []


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("depth", range(5))
def test_zero_parameters_give_all_zero_state(n, depth):
    spec = AnsatzSpec(n, depth)
    amps = prepare_state(spec, np.zeros(spec.parameter_count)).amplitudes
    expected = np.zeros(1 << n)
    expected[0] = 1
    np.testing.assert_array_equal(amps, expected)


def test_ry_pi_flips_single_qubit():
    amps = prepare_state(AnsatzSpec(1, 0), [np.pi, 0.0]).amplitudes
    assert abs(amps[1]) == pytest.approx(1.0)
    assert abs(amps[0]) < 1e-15


def test_determinism_and_norm():
    spec = AnsatzSpec(2, 1)
    theta = random_parameters(spec, 42)
    a = prepare_state(spec, theta).amplitudes
    b = prepare_state(spec, theta).amplitudes
    assert np.array_equal(a, b)
    assert np.linalg.norm(a) == pytest.approx(1, abs=1e-10)


def test_random_parameters():
    spec = AnsatzSpec(3, 2)
    a, b = random_parameters(spec, 5), random_parameters(spec, 5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, random_parameters(spec, 6))
    draws = np.array([random_parameters(AnsatzSpec(1, 0), s)[0] for s in range(10_000)])
    assert -0.1 <= draws.mean() <= 0.1
    assert draws.min() >= -np.pi and draws.max() < np.pi


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 5), depth=st.integers(0, 3))
def test_fast_path_matches_gate_list(seed, n, depth):
    spec = AnsatzSpec(n, depth)
    theta = random_parameters(spec, seed)
    slow = apply_circuit(init_basis_state(n, 0), spec.gates(theta)).amplitudes
    np.testing.assert_allclose(prepare_state(spec, theta).amplitudes, slow, atol=1e-12)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_two_pi_periodicity(seed):
    spec = AnsatzSpec(3, 2)
    h = build_chain(ChainSpec(3, 0.7, "X", "Z"))
    theta = random_parameters(spec, seed)
    e = h.expectation(prepare_state(spec, theta).amplitudes)
    for i in range(spec.parameter_count):
        shifted = theta.copy()
        shifted[i] += 2 * np.pi
        assert h.expectation(prepare_state(spec, shifted).amplitudes) == pytest.approx(e, abs=1e-10)


def _coordinate_descent(energy, theta, sweeps=30):
    # each angle enters as A cos + B sin + C, so three probes give the exact minimizer
    theta = theta.copy()
    for _ in range(sweeps):
        for i in range(len(theta)):
            probes = []
            for shift in (0.0, np.pi / 2, np.pi):
                t = theta.copy()
                t[i] += shift
                probes.append(energy(t))
            e0, e1, e2 = probes
            c = (e0 + e2) / 2
            a, b = e0 - c, e1 - c
            theta[i] += np.arctan2(-b, -a)
    return theta


def test_expressibility_floor_n2_chain():
    spec = AnsatzSpec(2, 1)
    dense = kron_dense(build_chain(ChainSpec(2)))
    target = np.linalg.eigvalsh(dense)[0]

    def energy(t):
        psi = prepare_state(spec, t).amplitudes
        return float(np.vdot(psi, dense @ psi).real)

    rng = np.random.default_rng(0)
    starts = rng.uniform(-np.pi, np.pi, (2000, spec.parameter_count))
    ranked = sorted(starts, key=energy)[:10]
    best = min(energy(_coordinate_descent(energy, t)) for t in ranked)
    assert best == pytest.approx(target, abs=1e-3)


def test_driver_ground_state_reachable():
    # CZ fixes |0000>, then RY(-pi/2) in the last layer prepares |->^N
    spec = AnsatzSpec(4, 1)
    theta = np.zeros(spec.parameter_count)
    theta[8::2] = -np.pi / 2
    e = build_driver(4).expectation(prepare_state(spec, theta).amplitudes)
    assert e == pytest.approx(-4)

import numpy as np
import pytest

from aavqe.errors import DomainError, ResourceLimitError
from aavqe.hamiltonians import (
    PauliHamiltonian,
    PauliString,
    build_driver,
    build_exact_cover,
    interpolate,
)
from aavqe.oracle import (
    adiabatic_error_profile,
    brute_force_exact_cover,
    exact_spectrum,
    operator_norm,
)
from aavqe.problems import ExactCoverInstance, load_instance

from conftest import corpus, fixture_path, kron_dense

# dense eigensolver sweep of the ec_n6 fixture on a 101-point grid, via kron_dense
N6_MIN_GAP = 0.3254614492621234
N6_MIN_GAP_S = 0.60


def test_driver_spectrum():
    report = exact_spectrum(build_driver(3))
    assert report.ground_energy == pytest.approx(-3)
    assert report.gap == pytest.approx(2)
    assert np.linalg.norm(report.ground_state) == pytest.approx(1)


def test_spectrum_sorted_and_matches_kron():
    rng = np.random.default_rng(7)
    terms = [PauliString("".join(rng.choice(list("IXYZ"), 4)), rng.normal()) for _ in range(8)]
    h = PauliHamiltonian(4, terms)
    report = exact_spectrum(h, k=5)
    ref = np.linalg.eigvalsh(kron_dense(h))[:5]
    np.testing.assert_allclose(report.eigenvalues, ref, atol=1e-10)
    assert np.all(np.diff(report.eigenvalues) >= 0) and report.gap >= 0
    dense = kron_dense(h)
    np.testing.assert_allclose(
        dense @ report.ground_state, report.ground_energy * report.ground_state, atol=1e-9
    )


def test_spectrum_errors():
    with pytest.raises(DomainError):
        exact_spectrum(build_driver(2), k=1)
    with pytest.raises(ResourceLimitError):
        exact_spectrum(build_driver(15))


def test_diagonal_fast_path_matches_eigh():
    inst = load_instance(fixture_path("ec_n6.ec"))
    h = build_exact_cover(inst)
    fast = exact_spectrum(h, k=6)
    np.testing.assert_allclose(fast.eigenvalues, np.linalg.eigvalsh(kron_dense(h))[:6], atol=1e-12)


def test_brute_force_examples():
    assert brute_force_exact_cover(ExactCoverInstance(3, ((0, 1, 2),))) == [1, 2, 4]
    two = load_instance(fixture_path("two_clauses.ec"))
    assert two.clauses == ((0, 1, 2), (0, 1, 3))
    assert brute_force_exact_cover(two) == [1, 2, 12]
    assert brute_force_exact_cover(load_instance(fixture_path("unsat_n4.ec"))) == []


def test_unique_solution_fixtures_have_unit_gap():
    for name, inst in corpus(max_vars=10):
        if len(brute_force_exact_cover(inst)) != 1:
            continue
        report = exact_spectrum(build_exact_cover(inst))
        assert report.ground_energy == 0, name
        assert report.eigenvalues[1] == 1, name


def test_zero_ground_energy_iff_solvable():
    for name, inst in corpus(max_vars=12):
        solvable = bool(brute_force_exact_cover(inst))
        e0 = exact_spectrum(build_exact_cover(inst)).ground_energy
        assert (abs(e0) < 1e-12) == solvable, name


def test_degeneracy_equals_solution_count():
    for name, inst in corpus(max_vars=10):
        h = build_exact_cover(inst)
        vals = exact_spectrum(h, k=1 << inst.n_vars).eigenvalues
        degeneracy = int(np.sum(np.abs(vals - vals[0]) < 1e-9))
        n_solutions = len(brute_force_exact_cover(inst))
        if n_solutions:
            assert degeneracy == n_solutions, name


def test_profile_endpoints():
    h0 = build_driver(2)
    inst = ExactCoverInstance(4, ((0, 1, 2), (1, 2, 3)))
    p = adiabatic_error_profile(h0, build_driver(2) * 0.5, [0.0])
    assert p.points[0].gap == pytest.approx(2.0, abs=1e-12)
    unique = load_instance(fixture_path("ec_n6.ec"))
    p = adiabatic_error_profile(build_driver(6), build_exact_cover(unique), [1.0])
    assert p.points[0].gap == pytest.approx(1.0)
    assert not p.points[0].degenerate
    # several solutions: degenerate ground level is flagged, not an error
    p = adiabatic_error_profile(build_driver(4), build_exact_cover(inst), [1.0])
    assert p.points[0].degenerate and p.points[0].ratio == float("inf")


def test_profile_n6_minimum_gap():
    inst = load_instance(fixture_path("ec_n6.ec"))
    profile = adiabatic_error_profile(build_driver(6), build_exact_cover(inst), np.linspace(0, 1, 101))
    assert len(profile.points) == 101
    best = profile.min_gap
    assert best.s == pytest.approx(N6_MIN_GAP_S)
    assert best.gap == pytest.approx(N6_MIN_GAP, abs=1e-9)
    assert profile.max_ratio == max(p.ratio for p in profile.points)


def test_profile_ratio_definition():
    inst = load_instance(fixture_path("ec_n4.ec"))
    h0, hp = build_driver(4), build_exact_cover(inst)
    p = adiabatic_error_profile(h0, hp, [0.4]).points[0]
    vals, vecs = np.linalg.eigh(kron_dense(interpolate(h0, hp, 0.4)))
    num = abs(vecs[:, 1].conj() @ kron_dense(hp - h0) @ vecs[:, 0])
    assert p.gap == pytest.approx(vals[1] - vals[0])
    assert p.numerator == pytest.approx(num)
    assert p.ratio == pytest.approx(num / p.gap**2)


@pytest.mark.parametrize("name", ["ec_n4.ec", "ec_n6.ec", "ec_n8.ec"])
def test_gap_continuity(name):
    inst = load_instance(fixture_path(name))
    h0, hp = build_driver(inst.n_vars), build_exact_cover(inst)
    grid = np.linspace(0, 1, 41)
    gaps = [p.gap for p in adiabatic_error_profile(h0, hp, grid).points]
    bound = operator_norm(hp - h0) * (grid[1] - grid[0])
    assert np.max(np.abs(np.diff(gaps))) <= bound + 1e-12


def test_profile_errors():
    with pytest.raises(DomainError):
        adiabatic_error_profile(build_driver(2), build_driver(3), [0.0])
    with pytest.raises(ResourceLimitError):
        adiabatic_error_profile(build_driver(13), build_driver(13), [0.0])


def test_operator_norm():
    assert operator_norm(build_driver(3)) == pytest.approx(3)

"""PDS(K) moment systems, polynomial roots, and energy bounds."""

import numpy as np
import pytest

from pdsq.backend import StateVector, exact_expectation, random_state
from pdsq.moments import MomentTable, PowerCache, moments_for_state
from pdsq.pauli import PauliSum
from pdsq.pds import (
    ComplexRootError,
    build_system,
    pds_energies,
    pds_from_values,
    polynomial_roots,
    transition_energies,
)

from test_moments import random_hermitian_sum


def table_from_values(values):
    values = np.asarray(values, dtype=float)
    return MomentTable(len(values) // 2, values, (), frozenset())


def test_k1_system_is_forced():
    system = build_system(table_from_values([1.0, -0.7]), 1)
    assert system.M == pytest.approx(np.array([[1.0]]))
    assert system.Y == pytest.approx(np.array([-0.7]))
    assert system.X == pytest.approx(np.array([0.7]))


def test_k2_system_hand_moments():
    # h = Z measured in |+>: <Z>=0, <Z^2>=1, <Z^3>=0
    z = PauliSum.from_labels(1, {"Z": 1.0})
    plus = StateVector(1, np.array([1.0, 1.0]) / np.sqrt(2.0))
    table = moments_for_state(z, plus, 2)
    assert np.allclose(table.values, [1.0, 0.0, 1.0, 0.0], atol=1e-12)
    system = build_system(table, 2)
    assert np.allclose(system.M, np.eye(2), atol=1e-12)
    assert np.allclose(system.Y, [0.0, 1.0], atol=1e-12)
    assert np.allclose(system.X, [0.0, -1.0], atol=1e-12)
    result = polynomial_roots(system.X)
    assert np.allclose(result.roots, [-1.0, 1.0], atol=1e-12)


def test_build_system_needs_enough_moments():
    with pytest.raises(ValueError, match="need moments"):
        build_system(table_from_values([1.0, -0.5]), 2)


def test_polynomial_roots_trivials():
    res = polynomial_roots(np.array([0.0, -1.0]))
    assert np.allclose(res.roots, [-1.0, 1.0])
    res = polynomial_roots(np.array([0.7]))
    assert np.allclose(res.roots, [-0.7])
    assert res.ground_bound == pytest.approx(-0.7)


def test_polynomial_roots_recovers_known_roots():
    rng = np.random.default_rng(2)
    roots = np.sort(rng.uniform(-3, 3, size=6))
    coeffs = np.poly(roots)  # monic by construction
    res = polynomial_roots(coeffs[1:])
    assert np.allclose(res.roots, roots, atol=1e-9)
    assert np.max(res.residuals) < 1e-8


def test_polynomial_roots_rejects_nonfinite():
    with pytest.raises(ValueError, match="finite"):
        polynomial_roots(np.array([np.nan, 1.0]))


def test_complex_ground_root_raises():
    # impossible moment sequence: <H^2> = -1 makes the K=2 polynomial E^2 + 1
    with pytest.raises(ComplexRootError, match="beyond tolerance"):
        pds_from_values([1.0, 0.0, -1.0, 0.0], 2)


def test_upper_complex_pair_is_surfaced_not_fatal():
    # monic cubic with one real root and a complex pair well above it
    coeffs = np.poly([-2.0, 1.0 + 0.5j, 1.0 - 0.5j]).real
    res = polynomial_roots(coeffs[1:])
    assert res.roots[0] == pytest.approx(-2.0)
    assert res.imag_parts[0] == 0.0
    assert res.discarded_imaginary == pytest.approx(0.5)
    with pytest.raises(ComplexRootError):
        res.require_real(1)


def test_exact_recovery_when_k_matches_support():
    """With K equal to the number of eigenvalues carrying weight, the roots
    are exactly those eigenvalues (dense-diagonalization oracle)."""
    rng = np.random.default_rng(11)
    for _ in range(5):
        h = random_hermitian_sum(rng, 2, 6)
        dense = h.to_matrix()
        evals, evecs = np.linalg.eigh(dense)
        state = random_state(2, rng)
        overlaps = np.abs(evecs.conj().T @ state.amplitudes) ** 2
        support = evals[overlaps > 1e-12]
        distinct = []
        for e in support:
            if not distinct or abs(e - distinct[-1]) > 1e-9:
                distinct.append(e)
        K = len(distinct)
        result = pds_energies(h, state, K)
        assert np.allclose(result.roots, distinct, atol=1e-7)


def test_bound_property_random_instances():
    rng = np.random.default_rng(23)
    for _ in range(20):
        h = random_hermitian_sum(rng, 3, 8)
        ground = np.linalg.eigvalsh(h.to_matrix())[0]
        state = random_state(3, rng)
        mean = exact_expectation(h, state)
        cache = PowerCache(h)
        for K in (1, 2, 3):
            res = pds_energies(h, state, K, cache)
            assert ground - 1e-8 <= res.roots[0] <= mean + 1e-8


def test_h4_system_solvable_with_consistent_solution(h4_problem):
    table = moments_for_state(
        h4_problem.hamiltonian, h4_problem.sectors["singlet"].state, 10,
        h4_problem.cache,
    )
    system = build_system(table, 10)
    assert np.isfinite(system.condition_estimate)
    residual = system.M @ system.X + system.Y
    scale = np.linalg.norm(system.Y)
    assert np.linalg.norm(residual) / scale < 1e-6


def test_transition_energies_trivial_and_error_paths():
    res = polynomial_roots(np.array([0.0, -1.0]))
    tr = transition_energies(res, res)
    assert tr.s0_t0_ev == 0.0
    single = polynomial_roots(np.array([0.5]))
    with pytest.raises(ValueError, match="two singlet roots"):
        transition_energies(single, res)

"""Hamiltonian powers, moment evaluation, and the unique-string ledger."""

import numpy as np
import pytest

from pdsq.backend import apply_pauli_sum, prepare_basis_state, random_state
from pdsq.moments import (
    PowerCache,
    TermBudgetError,
    hamiltonian_power,
    moments_for_state,
    unique_string_count,
)
from pdsq.pauli import PauliSum, multiply_sums

from oracles import pauli_sum_to_dense


def random_hermitian_sum(rng, n_qubits, n_terms):
    letters = "IXYZ"
    labels = {}
    for _ in range(n_terms):
        label = "".join(rng.choice(list(letters), size=n_qubits))
        labels[label] = labels.get(label, 0.0) + rng.standard_normal()
    return PauliSum.from_labels(n_qubits, labels)


def test_power_trivials():
    z = PauliSum.from_labels(1, {"Z": 1.0})
    assert hamiltonian_power(z, 2).identity_coefficient == pytest.approx(1.0)
    assert hamiltonian_power(z, 2).n_terms == 1

    xz = PauliSum.from_labels(1, {"X": 1.0, "Z": 1.0})
    sq = hamiltonian_power(xz, 2)
    assert sq.n_terms == 1
    assert sq.identity_coefficient == pytest.approx(2.0)

    assert hamiltonian_power(z, 0).identity_coefficient == 1.0


def test_power_matches_dense_oracle():
    rng = np.random.default_rng(31)
    h = random_hermitian_sum(rng, 3, 10)
    dense = pauli_sum_to_dense(h)
    cache = PowerCache(h)
    expected = np.linalg.matrix_power(dense, 5)
    assert np.max(np.abs(pauli_sum_to_dense(cache.power(5)) - expected)) < 1e-10


def test_repeated_squaring_agrees_with_iteration():
    rng = np.random.default_rng(5)
    h = random_hermitian_sum(rng, 3, 8)
    cache = PowerCache(h)
    h2 = multiply_sums(h, h)
    h4 = multiply_sums(h2, h2)
    direct = cache.power(4)
    for s, c in h4.terms():
        assert direct.coefficient(s) == pytest.approx(c, abs=1e-10)


def test_cache_validation():
    h = PauliSum.from_labels(1, {"Z": 1.0})
    other = PauliSum.from_labels(1, {"X": 1.0})
    cache = PowerCache(h)
    with pytest.raises(ValueError, match="different Hamiltonian"):
        hamiltonian_power(other, 2, cache)
    with pytest.raises(ValueError, match="non-negative"):
        cache.power(-1)


def test_term_budget_overflow():
    rng = np.random.default_rng(17)
    h = random_hermitian_sum(rng, 4, 30)
    cache = PowerCache(h, term_cap=20)
    with pytest.raises(TermBudgetError, match="cap"):
        cache.power(3)


def test_moments_of_basis_state_with_z():
    z = PauliSum.from_labels(1, {"Z": 1.0})
    table = moments_for_state(z, prepare_basis_state("0"), K=3)
    assert np.allclose(table.values, 1.0)
    assert table.values[0] == 1.0


def test_moment_table_bookkeeping():
    z = PauliSum.from_labels(1, {"Z": 1.0})
    table = moments_for_state(z, prepare_basis_state("0"), K=3)
    assert table.max_power == 5
    assert len(table.per_power_strings) == 6
    assert table.n_circuits == 1  # identity excluded


def test_singlet_first_moment_is_scf_energy(h4_problem):
    table = moments_for_state(
        h4_problem.hamiltonian, h4_problem.sectors["singlet"].state, 2,
        h4_problem.cache,
    )
    assert table.values[0] == 1.0
    assert table.values[1] == pytest.approx(h4_problem.scf.scf_energy, abs=1e-10)


def test_moments_match_dense_oracle():
    rng = np.random.default_rng(3)
    h = random_hermitian_sum(rng, 3, 12)
    state = random_state(3, rng)
    dense = pauli_sum_to_dense(h)
    table = moments_for_state(h, state, K=4)
    v = state.amplitudes
    for n in range(8):
        expected = np.real(v.conj() @ np.linalg.matrix_power(dense, n) @ v)
        assert table.values[n] == pytest.approx(expected, abs=1e-10)


def test_split_power_pipelined_cross_check(h4_problem):
    """<phi|H^n|phi> via repeated statevector application of H^(a), H^(b)."""
    h = h4_problem.hamiltonian
    state = h4_problem.sectors["singlet"].state
    table = moments_for_state(h, state, K=3, cache=h4_problem.cache)
    for n, (a, b) in ((3, (1, 2)), (5, (2, 3)), (4, (2, 2))):
        # <phi| H^a H^b |phi> contracted from two half-power applications
        va = apply_pauli_sum(h4_problem.cache.power(a), state)
        vb = apply_pauli_sum(h4_problem.cache.power(b), state)
        pipelined = np.real(np.vdot(va, vb))
        assert table.values[n] == pytest.approx(pipelined, rel=1e-9)


def test_unique_count_single_string_hamiltonian():
    z = PauliSum.from_labels(1, {"Z": 2.0})
    assert unique_string_count(z, 6) == [1, 1, 1, 1, 1, 1]


def test_unique_count_monotone_and_bounded(h4_problem):
    counts = unique_string_count(h4_problem.hamiltonian, 19, h4_problem.cache)
    assert all(b >= a for a, b in zip(counts, counts[1:]))
    n = h4_problem.hamiltonian.n_qubits
    assert counts[-1] <= 2 ** (n - 1) * (2**n + 1)


def test_hankel_matrix_is_positive_semidefinite(h4_problem):
    table = moments_for_state(
        h4_problem.hamiltonian, h4_problem.sectors["singlet"].state, 10,
        h4_problem.cache,
    )
    K = 10
    idx = np.arange(1, K + 1)
    M = table.values[2 * K - idx[:, None] - idx[None, :]]
    eigs = np.linalg.eigvalsh(M)
    assert eigs.min() > -1e-8

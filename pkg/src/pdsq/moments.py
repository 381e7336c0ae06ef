"""Hamiltonian powers, moment tables, and the unique-string ledger.

Powers are computed iteratively (H^n = H^{n-1} * H) with simplification at
every step and cached, since all moments up to order 2K-1 reuse the same
ladder.  The unique-string ledger counts every distinct Pauli string across
the powers, excluding the identity, whose expectation never needs a circuit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import StateVector, exact_expectation
from .pauli import PauliString, PauliSum, multiply_sums


class TermBudgetError(RuntimeError):
    """A Hamiltonian power exceeded the configured term cap."""


class PowerCache:
    """Caches H^0..H^n for one Hamiltonian; read-only after each fill."""

    def __init__(self, h: PauliSum, *, term_cap: int = 10_000_000):
        self.h = h
        self.term_cap = term_cap
        self._powers: dict[int, PauliSum] = {0: PauliSum.identity(h.n_qubits), 1: h}

    def power(self, n: int) -> PauliSum:
        if n < 0:
            raise ValueError("power must be non-negative")
        top = max(self._powers)
        while top < n:
            nxt = multiply_sums(self._powers[top], self.h)
            if nxt.n_terms > self.term_cap:
                raise TermBudgetError(
                    f"H^{top + 1} has {nxt.n_terms} terms (cap {self.term_cap})"
                )
            top += 1
            self._powers[top] = nxt
        return self._powers[n]


def hamiltonian_power(h: PauliSum, n: int, cache: PowerCache | None = None) -> PauliSum:
    """H^n as a simplified Pauli sum; supply a cache to reuse lower powers."""
    if cache is None:
        cache = PowerCache(h)
    elif cache.h is not h:
        raise ValueError("cache was built for a different Hamiltonian")
    return cache.power(n)


@dataclass(frozen=True)
class MomentTable:
    """Moments <H^n> for n = 0..2K-1 plus the per-power string bookkeeping."""

    K: int
    values: np.ndarray  # length 2K, values[0] == 1
    per_power_strings: tuple[frozenset[PauliString], ...]
    unique_strings: frozenset[PauliString]

    @property
    def max_power(self) -> int:
        return 2 * self.K - 1

    @property
    def n_circuits(self) -> int:
        """Distinct strings to measure: the unique set minus the identity."""
        return sum(1 for s in self.unique_strings if not s.is_identity)


def _power_strings(power: PauliSum) -> frozenset[PauliString]:
    return frozenset(power.strings())


def moments_for_state(
    h: PauliSum,
    state: StateVector,
    K: int,
    cache: PowerCache | None = None,
    imag_tol: float = 1e-10,
) -> MomentTable:
    """Exact statevector moments of H up to order 2K-1 for one trial state."""
    if K < 1:
        raise ValueError("K must be at least 1")
    if cache is None:
        cache = PowerCache(h)
    values = np.empty(2 * K)
    per_power = []
    unique: set[PauliString] = set()
    for n in range(2 * K):
        power = cache.power(n)
        moment = exact_expectation(power, state, imag_tol=imag_tol)
        values[n] = moment
        strings = _power_strings(power)
        per_power.append(strings)
        unique |= strings
    return MomentTable(K, values, tuple(per_power), frozenset(unique))


def unique_string_count(
    h: PauliSum, max_power: int, cache: PowerCache | None = None
) -> list[int]:
    """Cumulative count of distinct non-identity strings over H^1..H^n.

    Entry k (0-based) covers powers up to k+1; the sequence is monotone and
    saturates once the powers stop producing new strings.
    """
    if cache is None:
        cache = PowerCache(h)
    identity = PauliString.identity(h.n_qubits)
    seen: set[PauliString] = set()
    counts = []
    for n in range(1, max_power + 1):
        seen |= _power_strings(cache.power(n))
        seen.discard(identity)
        counts.append(len(seen))
    return counts

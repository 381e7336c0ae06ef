"""Exact statevector engine and shot sampler for packed measurement circuits.

Basis-state indexing: bit k of an index is qubit k, and serialized
bitstrings put qubit 0 leftmost, so `index_to_bits(5, 4) == "1010"`.
Packed 20-qubit executions are sampled slot by slot and concatenated, which
is exact because slots never share entanglement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .pauli import PauliSum

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
# Basis-change matrices: measuring X or Y in the computational basis.
_BASIS_CHANGE = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2,
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
}


def index_to_bits(index: int, n_bits: int) -> str:
    return "".join("1" if (index >> k) & 1 else "0" for k in range(n_bits))


def bits_to_index(bits: str | Sequence[int]) -> int:
    index = 0
    for k, b in enumerate(bits):
        if b in ("1", 1):
            index |= 1 << k
        elif b not in ("0", 0):
            raise ValueError(f"invalid bit {b!r}")
    return index


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude length must be 2**n_qubits")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state is not normalized (norm {norm!r})")

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def prepare_basis_state(bits: str | Sequence[int]) -> StateVector:
    """One-hot state |bits>, qubit 0 given by the leftmost bit."""
    n = len(bits)
    amps = np.zeros(1 << n, dtype=complex)
    amps[bits_to_index(bits)] = 1.0
    return StateVector(n, amps)


def random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    amps = rng.standard_normal(1 << n_qubits) + 1j * rng.standard_normal(1 << n_qubits)
    return StateVector(n_qubits, amps / np.linalg.norm(amps))


def apply_pauli_sum(h: PauliSum, state: StateVector) -> np.ndarray:
    """Amplitudes of h|state> (not normalized)."""
    if 1 << h.n_qubits != state.amplitudes.size:
        raise ValueError("operator and state dimensions differ")
    amps = state.amplitudes
    idx = np.arange(amps.size, dtype=np.uint64)
    out = np.zeros_like(amps)
    for (xm, zm), phase_coeff in _iter_phase_terms(h):
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & np.uint64(zm)).astype(np.int64) & 1)
        vals = phase_coeff * signs * amps
        if xm:
            out += vals[idx ^ np.uint64(xm)]
        else:
            out += vals
    return out


def _iter_phase_terms(h: PauliSum) -> Iterable[tuple[tuple[int, int], complex]]:
    # folds the i^{|x & z|} letter normalization into the coefficient
    phases = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)
    for string, coeff in h.terms():
        yield (string.x, string.z), coeff * phases[(string.x & string.z).bit_count() % 4]


def exact_expectation(h: PauliSum, state: StateVector, imag_tol: float = 1e-10) -> float:
    """<state|h|state>, checked to be real within imag_tol."""
    value = np.vdot(state.amplitudes, apply_pauli_sum(h, state))
    if abs(value.imag) > imag_tol * max(1.0, abs(value.real)):
        raise ValueError(f"expectation has imaginary part {value.imag:.3e}")
    return float(value.real)


def apply_basis_changes(state: StateVector, gates: Sequence[Sequence[str]]) -> StateVector:
    """Apply per-qubit gate name sequences (from rotation_circuit) to a state."""
    n = state.n_qubits
    if len(gates) != n:
        raise ValueError("need one gate list per qubit")
    amps = state.amplitudes.reshape((2,) * n)
    for qubit, gate_names in enumerate(gates):
        axis = n - 1 - qubit  # C-order: qubit 0 is the fastest-varying bit
        for name in gate_names:
            mat = _BASIS_CHANGE[name]
            amps = np.moveaxis(
                np.tensordot(mat, np.moveaxis(amps, axis, 0), axes=([1], [0])), 0, axis
            )
    return StateVector(n, amps.reshape(-1))


@dataclass(frozen=True)
class NoiseModel:
    """Independent symmetric readout bit flips with probability p per qubit."""

    spam_flip_probability: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        p = self.spam_flip_probability
        if not 0.0 <= p < 0.5:
            raise ValueError("flip probability must lie in [0, 0.5)")


@dataclass(frozen=True)
class CountTable:
    """Bitstring histogram; keys use the project-wide qubit-0-leftmost order."""

    n_bits: int
    counts: dict[str, int]
    shots: int

    def __post_init__(self):
        total = sum(self.counts.values())
        if total != self.shots:
            raise ValueError(f"counts sum to {total}, expected {self.shots}")
        for key in self.counts:
            if len(key) != self.n_bits or set(key) - {"0", "1"}:
                raise ValueError(f"malformed bitstring key {key!r}")

    @classmethod
    def from_indices(cls, indices: np.ndarray, n_bits: int) -> "CountTable":
        values, freq = np.unique(np.asarray(indices, dtype=np.int64), return_counts=True)
        counts = {index_to_bits(int(v), n_bits): int(c) for v, c in zip(values, freq)}
        return cls(n_bits, counts, int(freq.sum()))

    def probabilities(self) -> dict[str, float]:
        if self.shots == 0:
            raise ValueError("empty histogram")
        return {k: v / self.shots for k, v in self.counts.items()}

    def marginal(self, positions: Sequence[int]) -> "CountTable":
        """Histogram over the selected bit positions, order preserved."""
        out: dict[str, int] = {}
        for key, c in self.counts.items():
            sub = "".join(key[p] for p in positions)
            out[sub] = out.get(sub, 0) + c
        return CountTable(len(positions), out, self.shots)

    def to_lines(self) -> str:
        return "\n".join(f"{k} {v}" for k, v in sorted(self.counts.items()))

    @classmethod
    def from_lines(cls, text: str) -> "CountTable":
        counts: dict[str, int] = {}
        n_bits = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'bitstring count'")
            key, value = parts
            if n_bits is None:
                n_bits = len(key)
            counts[key] = counts.get(key, 0) + int(value)
        if n_bits is None:
            raise ValueError("no histogram lines found")
        return cls(n_bits, counts, sum(counts.values()))


def _sample_outcome_indices(
    state: StateVector, gates, shots: int, rng: np.random.Generator
) -> np.ndarray:
    rotated = apply_basis_changes(state, gates)
    probs = rotated.probabilities()
    probs = probs / probs.sum()
    return rng.choice(probs.size, size=shots, p=probs)


def _apply_bit_flips(
    indices: np.ndarray, n_bits: int, p: float, rng: np.random.Generator
) -> np.ndarray:
    if p <= 0.0:
        return indices
    flips = rng.random((indices.size, n_bits)) < p
    masks = flips @ (1 << np.arange(n_bits, dtype=np.int64))
    return indices ^ masks


def serial_sample(
    state: StateVector,
    group,
    shots: int,
    noise: NoiseModel | None = None,
    seed=None,
) -> CountTable:
    """Sample one QWC group's rotated measurement on its own register."""
    from .grouping import rotation_circuit

    if shots <= 0:
        raise ValueError("shots must be positive")
    rng = np.random.default_rng(seed)
    outcomes = _sample_outcome_indices(state, rotation_circuit(group), shots, rng)
    if noise is not None and noise.spam_flip_probability > 0.0:
        flip_rng = rng if noise.seed is None else np.random.default_rng(noise.seed)
        outcomes = _apply_bit_flips(
            outcomes, state.n_qubits, noise.spam_flip_probability, flip_rng
        )
    return CountTable.from_indices(outcomes, state.n_qubits)


def sample_batch(
    state_per_slot: Sequence[StateVector],
    batch,
    shots: int,
    noise: NoiseModel | None = None,
    seed=None,
) -> CountTable:
    """Joint counts for a packed execution: slots sampled independently and
    concatenated (exact, since slot states are unentangled), then flipped."""
    from .grouping import rotation_circuit

    if shots <= 0:
        raise ValueError("shots must be positive")
    if len(state_per_slot) != len(batch.slots):
        raise ValueError("need one prepared state per filled slot")
    rng = np.random.default_rng(seed)
    register = batch.register_width
    joint = np.zeros(shots, dtype=np.int64)
    for state, (group, offset) in zip(state_per_slot, batch.slots):
        outcomes = _sample_outcome_indices(state, rotation_circuit(group), shots, rng)
        joint |= outcomes << offset
    if noise is not None and noise.spam_flip_probability > 0.0:
        flip_rng = rng if noise.seed is None else np.random.default_rng(noise.seed)
        joint = _apply_bit_flips(joint, register, noise.spam_flip_probability, flip_rng)
    return CountTable.from_indices(joint, register)

"""Inversion of tensored symmetric readout bit-flip noise on count data.

The noise channel is S = [[1-p, p], [p, 1-p]] independently per qubit, so
its inverse factorizes per qubit as (S_ij)^-1 = (p - delta_ij)/(2p - 1) and
the mitigated probability of string i over the observed support B is

    P~_i  =  sum_{j in B}  a^(n - d(i,j)) * b^d(i,j) * P_j,

with a = (p-1)/(2p-1), b = p/(2p-1) and d the Hamming distance.  The
support is restricted to observed strings (building the full 2^n channel is
deliberately out of scope), then negatives are clipped and the distribution
renormalized.  Cost is O(|B|^2) Hamming evaluations, vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import CountTable, bits_to_index, index_to_bits


@dataclass(frozen=True)
class MitigationConfig:
    p: float  # per-qubit symmetric flip probability

    def __post_init__(self):
        if not 0.0 <= self.p < 0.5:
            raise ValueError("flip probability must lie in [0, 0.5): p=0.5 is singular")


def _as_probability_items(counts) -> tuple[int, list[str], np.ndarray]:
    if isinstance(counts, CountTable):
        probs = counts.probabilities()
        n_bits = counts.n_bits
    elif isinstance(counts, dict):
        if not counts:
            raise ValueError("empty histogram")
        total = float(sum(counts.values()))
        if total <= 0.0:
            raise ValueError("histogram has no weight")
        probs = {k: v / total for k, v in counts.items()}
        n_bits = len(next(iter(counts)))
    else:
        raise TypeError("expected CountTable or dict of bitstring weights")
    keys = sorted(probs)
    if any(len(k) != n_bits for k in keys):
        raise ValueError("bitstring keys have inconsistent lengths")
    return n_bits, keys, np.array([probs[k] for k in keys])


def mitigate(counts, cfg: MitigationConfig) -> dict[str, float]:
    """Error-mitigated probabilities over the observed bitstrings.

    Exact inverse of the forward channel when the support is complete;
    approximate (clip + renormalize) otherwise.
    """
    n_bits, keys, p_obs = _as_probability_items(counts)
    p = cfg.p
    if p == 0.0:
        return dict(zip(keys, p_obs))

    a = (p - 1.0) / (2.0 * p - 1.0)
    b = p / (2.0 * p - 1.0)
    indices = np.array([bits_to_index(k) for k in keys], dtype=np.uint64)
    # inverse-element factor a^(n-d) b^d for every Hamming distance d
    dist_factor = np.array([a ** (n_bits - d) * b**d for d in range(n_bits + 1)])

    mitigated = np.empty(len(keys))
    chunk = max(1, 2_000_000 // max(len(keys), 1))
    for start in range(0, len(keys), chunk):
        block = indices[start : start + chunk, None] ^ indices[None, :]
        d = np.bitwise_count(block).astype(np.int64)
        mitigated[start : start + chunk] = dist_factor[d] @ p_obs

    clipped = np.clip(mitigated, 0.0, None)
    total = clipped.sum()
    if total <= 0.0:
        raise ValueError("mitigation produced an empty distribution")
    clipped /= total
    return dict(zip(keys, clipped))


def apply_flip_channel(probs: dict[str, float], p: float) -> dict[str, float]:
    """Exact forward push of a distribution through the bit-flip channel,
    over the full 2^n outcome space (analysis helper for small n)."""
    if not probs:
        raise ValueError("empty distribution")
    n_bits = len(next(iter(probs)))
    if n_bits > 20:
        raise ValueError("full-space channel limited to 20 bits")
    dim = 1 << n_bits
    dense = np.zeros(dim)
    for k, w in probs.items():
        dense[bits_to_index(k)] += w
    idx = np.arange(dim, dtype=np.uint64)
    out = np.zeros(dim)
    factor = np.array([(1.0 - p) ** (n_bits - d) * p**d for d in range(n_bits + 1)])
    chunk = max(1, 4_000_000 // dim)
    for start in range(0, dim, chunk):
        block = idx[start : start + chunk, None] ^ idx[None, :]
        d = np.bitwise_count(block).astype(np.int64)
        out[start : start + chunk] = factor[d] @ dense
    return {index_to_bits(i, n_bits): float(v) for i, v in enumerate(out) if v > 0.0}

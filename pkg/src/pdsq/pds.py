"""PDS(K) energy functional: moment linear system, polynomial roots, bounds.

The K-th order functional consumes moments <H^n> up to n = 2K-1, solves the
Hankel system M X = -Y by truncated-SVD pseudoinverse (the matrix turns
violently near-singular as K grows), and reads state-energy upper bounds off
the roots of the monic polynomial with coefficients X.

In double precision the truncated solve pins down the low, bound-carrying
roots to high accuracy while the top of the root set can degenerate into
conjugate pairs once the retained rank drops below K.  Results therefore
keep every root's imaginary magnitude alongside its real part: a hard error
is raised only when contamination beyond tolerance reaches a root a caller
actually consumes, which is the signature of moments too noisy to use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import StateVector
from .moments import MomentTable, PowerCache, moments_for_state
from .pauli import PauliSum
from .units import EV_PER_HARTREE

# Relative singular-value cutoff for the Hankel solve.  1e-12 already
# stabilizes the ground root, but the second root of the K=10 singlet system
# needs the two extra decades to pin the singlet gap below a milli-hartree.
DEFAULT_SVD_CUTOFF = 1e-14
DEFAULT_IMAG_TOL = 1e-6  # hartree


class ComplexRootError(RuntimeError):
    """A consumed polynomial root kept an imaginary part beyond tolerance,
    signalling noisy or inconsistent moments rather than a numerical hiccup."""

    def __init__(self, root: complex, index: int):
        super().__init__(
            f"root {index} = {root} has |Im| = {abs(root.imag):.3e} beyond tolerance"
        )
        self.root = root
        self.index = index


@dataclass(frozen=True)
class MomentSystem:
    K: int
    M: np.ndarray
    Y: np.ndarray
    X: np.ndarray
    condition_estimate: float
    rank: int


@dataclass(frozen=True)
class PdsResult:
    roots: np.ndarray  # real parts, ascending, hartree
    imag_parts: np.ndarray  # |Im| aligned with roots
    residuals: np.ndarray  # |P_K(root)| per root
    discarded_imaginary: float  # max |Im| encountered

    @property
    def ground_bound(self) -> float:
        return float(self.roots[0])

    def require_real(self, index: int, imag_tol: float = DEFAULT_IMAG_TOL) -> float:
        """Root value at `index`, erroring if it carries imaginary weight."""
        if self.imag_parts[index] > imag_tol:
            raise ComplexRootError(
                complex(self.roots[index], self.imag_parts[index]), index
            )
        return float(self.roots[index])


def build_system(
    moments: MomentTable, K: int, svd_cutoff: float = DEFAULT_SVD_CUTOFF
) -> MomentSystem:
    """Assemble and solve M X = -Y from a moment table covering order 2K-1."""
    values = moments.values
    if len(values) < 2 * K:
        raise ValueError(f"need moments up to order {2 * K - 1}, have {len(values) - 1}")
    # 1-based i, j = 1..K: M_ij = <H^{2K-i-j}>, Y_i = <H^{2K-i}>
    idx = np.arange(1, K + 1)
    M = values[2 * K - idx[:, None] - idx[None, :]]
    Y = values[2 * K - idx]

    u, s, vt = np.linalg.svd(M)
    keep = s > svd_cutoff * s[0]
    if not np.any(keep):
        raise ValueError("moment matrix has no singular value above the cutoff")
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    X = -(vt.T * inv) @ (u.T @ Y)
    condition = float(s[0] / s[keep][-1])
    return MomentSystem(K, M, Y, X, condition, int(keep.sum()))


def polynomial_roots(X: np.ndarray, imag_tol: float = DEFAULT_IMAG_TOL) -> PdsResult:
    """Roots of E^K + sum_i X_i E^{K-i}, via companion-matrix eigenvalues.

    Imaginary parts below imag_tol are projected away silently; larger ones
    are recorded per root, and raise immediately when they touch the ground
    (minimum) root, whose realness every use of the functional relies on.
    """
    X = np.asarray(X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise ValueError("polynomial coefficients must be finite")
    coeffs = np.concatenate(([1.0], X))
    raw = np.roots(coeffs)
    order = np.argsort(raw.real)
    roots = raw.real[order]
    imag_parts = np.abs(raw.imag[order])
    imag_parts[imag_parts <= imag_tol] = 0.0
    if len(roots) and imag_parts[0] > imag_tol:
        raise ComplexRootError(complex(roots[0], imag_parts[0]), 0)
    residuals = np.abs(np.polyval(coeffs, roots))
    worst = float(np.max(imag_parts)) if len(roots) else 0.0
    return PdsResult(roots, imag_parts, residuals, worst)


def pds_from_values(
    moment_values: np.ndarray,
    K: int,
    svd_cutoff: float = DEFAULT_SVD_CUTOFF,
    imag_tol: float = DEFAULT_IMAG_TOL,
) -> PdsResult:
    """PDS(K) result from a raw vector of moments <H^0>..<H^{2K-1}>."""
    table = MomentTable(K, np.asarray(moment_values, dtype=float), (), frozenset())
    system = build_system(table, K, svd_cutoff)
    return polynomial_roots(system.X, imag_tol)


def pds_energies(
    h: PauliSum,
    state: StateVector,
    K: int,
    cache: PowerCache | None = None,
    svd_cutoff: float = DEFAULT_SVD_CUTOFF,
    imag_tol: float = DEFAULT_IMAG_TOL,
) -> PdsResult:
    """Exact-moment PDS(K) bounds for one trial state.

    For a closed-shell reference the two lowest roots bound/approximate the
    lowest two singlet levels; a triplet reference bounds the triplet ground
    level through its own sector.
    """
    table = moments_for_state(h, state, K, cache=cache)
    system = build_system(table, K, svd_cutoff)
    return polynomial_roots(system.X, imag_tol)


@dataclass(frozen=True)
class TransitionSummary:
    s0_s1_ev: float
    s0_t0_ev: float
    fission_ratio: float  # E(S0->S1) / (2 E(S0->T0)), slightly above 1 when viable


def transition_energies(singlet: PdsResult, triplet: PdsResult) -> TransitionSummary:
    """Singlet-fission energetics from the two sector results."""
    if len(singlet.roots) < 2:
        raise ValueError("need at least two singlet roots for the S0->S1 gap")
    s0 = singlet.require_real(0)
    s1 = singlet.require_real(1)
    t0 = triplet.require_real(0)
    s0_s1 = (s1 - s0) * EV_PER_HARTREE
    s0_t0 = (t0 - s0) * EV_PER_HARTREE
    ratio = s0_s1 / (2.0 * s0_t0) if s0_t0 != 0.0 else np.inf
    return TransitionSummary(float(s0_s1), float(s0_t0), float(ratio))

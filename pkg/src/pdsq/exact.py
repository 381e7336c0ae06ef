"""Exact reference spectra by dense diagonalization of qubit Hamiltonians.

Sector filtering selects computational basis states by electron count and
s_z under the blocked spin-orbital convention (alpha qubits first), which is
how "exact" singlet/triplet energies are extracted from the full spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliSum
from .units import EV_PER_HARTREE


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray  # ascending, hartree
    sector: tuple[int, float] | None = None  # (n_electrons, s_z) filter used

    @property
    def ground(self) -> float:
        return float(self.eigenvalues[0])


def sector_basis_indices(n_qubits: int, n_electrons: int, s_z: float) -> np.ndarray:
    """Basis-state indices with the requested occupation and spin projection."""
    if n_qubits % 2 != 0:
        raise ValueError("sector filtering expects an even qubit count")
    half = n_qubits // 2
    alpha_mask = (1 << half) - 1
    beta_mask = alpha_mask << half
    idx = np.arange(1 << n_qubits, dtype=np.uint64)
    n_alpha = np.bitwise_count(idx & np.uint64(alpha_mask)).astype(int)
    n_beta = np.bitwise_count(idx & np.uint64(beta_mask)).astype(int)
    keep = (n_alpha + n_beta == n_electrons) & (n_alpha - n_beta == round(2 * s_z))
    return np.nonzero(keep)[0]


def exact_spectrum(
    h: PauliSum, sector: tuple[int, float] | None = None
) -> SpectrumResult:
    """Eigenvalues of the dense Hamiltonian, optionally restricted to a sector."""
    if h.n_qubits > 16:
        raise ValueError("dense diagonalization limited to 16 qubits")
    matrix = h.to_matrix()
    if sector is not None:
        n_electrons, s_z = sector
        keep = sector_basis_indices(h.n_qubits, n_electrons, s_z)
        if keep.size == 0:
            raise ValueError(f"empty sector {sector}")
        matrix = matrix[np.ix_(keep, keep)]
    herm_defect = np.max(np.abs(matrix - matrix.conj().T))
    if herm_defect > 1e-9:
        raise ValueError(f"Hamiltonian is not Hermitian (defect {herm_defect:.2e})")
    eigenvalues = np.linalg.eigvalsh(matrix)
    return SpectrumResult(eigenvalues, sector)


def lowest_spin_singlet_excitation(
    singlet_sector: SpectrumResult,
    triplet_sector: SpectrumResult,
    degeneracy_tol: float = 1e-9,
) -> float:
    """First level above the ground state of the s_z=0 sector that has no
    degenerate partner in the s_z=1 sector (i.e. is a spin singlet)."""
    levels = singlet_sector.eigenvalues
    partners = triplet_sector.eigenvalues
    for e in levels[1:]:
        if not np.any(np.abs(partners - e) < degeneracy_tol):
            return float(e)
    raise ValueError("no spin-singlet excitation found in the filtered spectrum")


def exact_transitions(
    singlet_sector: SpectrumResult, triplet_sector: SpectrumResult
) -> tuple[float, float]:
    """(S0->S1, S0->T0) excitation energies in eV from sector-filtered spectra."""
    if len(singlet_sector.eigenvalues) < 2:
        raise ValueError("need at least two levels in the s_z=0 sector")
    s0 = singlet_sector.ground
    s1 = lowest_spin_singlet_excitation(singlet_sector, triplet_sector)
    t0 = triplet_sector.ground
    return (s1 - s0) * EV_PER_HARTREE, (t0 - s0) * EV_PER_HARTREE

"""Z2 symmetry detection and qubit tapering of Pauli-sum Hamiltonians.

Symmetries are Pauli strings commuting with every Hamiltonian term, found as
the GF(2) kernel of the term-wise symplectic check matrix.  Each generator
is paired with a single-qubit X partner on a qubit exclusive to it; the
Clifford (X_q + g)/sqrt(2) maps the generator onto that X, after which the
partner qubit carries only I or X in every term and can be replaced by the
sector eigenvalue +-1 and removed.

Reference determinants in the chosen sector taper to plain basis states on
the remaining qubits: the Clifford sends them to product states whose
removed-qubit factors are X eigenstates matching the sector signs, so
expectation values restrict exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .chem import ReferenceDeterminant
from .pauli import PauliString, PauliSum, commutes, multiply_sums


@dataclass(frozen=True)
class TaperingData:
    generators: tuple[PauliString, ...]
    paulix_partners: tuple[int, ...]  # one exclusive qubit per generator
    sector_signs: tuple[int, ...]
    removed_qubits: tuple[int, ...]
    n_remaining: int


def _gf2_rref(rows: np.ndarray) -> np.ndarray:
    """Reduced row-echelon form over GF(2); zero rows dropped."""
    m = rows.copy().astype(np.uint8) & 1
    n_rows, n_cols = m.shape
    pivot_row = 0
    for col in range(n_cols):
        hits = np.nonzero(m[pivot_row:, col])[0]
        if hits.size == 0:
            continue
        swap = pivot_row + hits[0]
        m[[pivot_row, swap]] = m[[swap, pivot_row]]
        others = np.nonzero(m[:, col])[0]
        for r in others:
            if r != pivot_row:
                m[r] ^= m[pivot_row]
        pivot_row += 1
        if pivot_row == n_rows:
            break
    keep = m.any(axis=1)
    return m[keep]


def _gf2_kernel_basis(rows: np.ndarray) -> np.ndarray:
    """Basis of {v : rows @ v = 0 mod 2}, one kernel vector per row."""
    n_cols = rows.shape[1]
    rref = _gf2_rref(rows)
    pivots = [int(np.nonzero(r)[0][0]) for r in rref]
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(n_cols, dtype=np.uint8)
        v[f] = 1
        for r, p in zip(rref, pivots):
            if r[f]:
                v[p] ^= 1
        basis.append(v)
    return np.array(basis, dtype=np.uint8).reshape(len(basis), n_cols)


def _mask_to_bits(mask: int, n: int) -> np.ndarray:
    return np.array([(mask >> k) & 1 for k in range(n)], dtype=np.uint8)


def _bits_to_mask(bits: np.ndarray) -> int:
    mask = 0
    for k, b in enumerate(bits):
        if b:
            mask |= 1 << k
    return mask


def find_symmetries(h: PauliSum) -> list[PauliString]:
    """Independent Z2 symmetry generators of h (empty list if none).

    The returned basis is in reduced row-echelon form with X components
    eliminated first, so generators come out purely Z whenever the kernel
    allows it; ordering is canonical for reproducible downstream counts.
    """
    n = h.n_qubits
    strings = h.strings()
    if not strings:
        return []
    check = np.zeros((len(strings), 2 * n), dtype=np.uint8)
    for row, s in enumerate(strings):
        check[row, :n] = _mask_to_bits(s.z, n)  # multiplies candidate x-part
        check[row, n:] = _mask_to_bits(s.x, n)  # multiplies candidate z-part
    kernel = _gf2_kernel_basis(check)
    if kernel.size == 0:
        return []
    # RREF over (x | z) columns: rows with pivots in the z block are pure Z
    reduced = _gf2_rref(kernel)
    generators = []
    for row in reduced:
        x_mask = _bits_to_mask(row[:n])
        z_mask = _bits_to_mask(row[n:])
        if x_mask == 0 and z_mask == 0:
            continue
        generators.append(PauliString(n, x_mask, z_mask))
    generators.sort(key=lambda s: (s.z, s.x))
    return generators


def sector_of(det: ReferenceDeterminant, generators) -> tuple[int, ...]:
    """Eigenvalue of each (purely Z) generator on the determinant."""
    signs = []
    occ = det.occupation_mask
    for g in generators:
        if g.x != 0:
            raise ValueError(f"generator {g.label} is not purely Z")
        signs.append(-1 if (occ & g.z).bit_count() & 1 else 1)
    return tuple(signs)


def build_tapering(
    h: PauliSum, generators, sector_signs
) -> TaperingData:
    """Choose X partners (lowest-index qubit exclusive to each generator)."""
    generators = tuple(generators)
    sector_signs = tuple(sector_signs)
    if len(generators) != len(sector_signs):
        raise ValueError("need one sector sign per generator")
    _check_generators(h, generators)
    supports = [g.support for g in generators]
    partners = []
    for i, g in enumerate(generators):
        others = 0
        for j, s in enumerate(supports):
            if j != i:
                others |= s
        # the partner must anticommute with its generator: Z or Y letter there
        exclusive = supports[i] & ~others & g.z
        if exclusive == 0:
            raise ValueError(
                f"generator {g.label} has no exclusive qubit for an X partner"
            )
        partners.append((exclusive & -exclusive).bit_length() - 1)
    removed = tuple(partners)
    return TaperingData(
        generators=generators,
        paulix_partners=tuple(partners),
        sector_signs=sector_signs,
        removed_qubits=removed,
        n_remaining=h.n_qubits - len(removed),
    )


def tapering_for_determinant(h: PauliSum, det: ReferenceDeterminant) -> TaperingData:
    """Convenience: symmetries of h with the sector fixed by a determinant."""
    generators = find_symmetries(h)
    return build_tapering(h, generators, sector_of(det, generators))


def _check_generators(h: PauliSum, generators) -> None:
    for g in generators:
        for t in h.strings():
            if not commutes(g, t):
                raise ValueError(
                    f"generator {g.label} does not commute with term {t.label}"
                )


def _compact_mask(mask: int, remaining: list[int]) -> int:
    out = 0
    for new, old in enumerate(remaining):
        if (mask >> old) & 1:
            out |= 1 << new
    return out


def taper_operator(h: PauliSum, td: TaperingData) -> PauliSum:
    """Restrict h to the sector fixed in td, on n_remaining qubits.

    The rotated Hamiltonian acts as I or X on every removed qubit; those
    letters are replaced by the sector signs.  The spectrum of the result is
    a subset of h's spectrum.
    """
    n = h.n_qubits
    rotated = h
    inv_sqrt2 = 1.0 / sqrt(2.0)
    for g, q in zip(td.generators, td.paulix_partners):
        u = PauliSum(n, {(1 << q, 0): inv_sqrt2, (g.x, g.z): inv_sqrt2})
        rotated = multiply_sums(multiply_sums(u, rotated), u)
    if rotated.max_imag() > 1e-9:
        raise ValueError("tapering rotation broke Hermiticity; incompatible data")

    removed = set(td.removed_qubits)
    remaining = [q for q in range(n) if q not in removed]
    sign_of = dict(zip(td.removed_qubits, td.sector_signs))
    terms: dict[tuple[int, int], complex] = {}
    for string, coeff in rotated.terms():
        factor = 1.0
        for q in removed:
            letter_x = (string.x >> q) & 1
            letter_z = (string.z >> q) & 1
            if letter_z:
                raise ValueError(
                    f"rotated term {string.label} acts as Z/Y on removed qubit {q}"
                )
            if letter_x:
                factor *= sign_of[q]
        key = (
            _compact_mask(string.x, remaining),
            _compact_mask(string.z, remaining),
        )
        terms[key] = terms.get(key, 0.0) + coeff * factor
    return PauliSum(td.n_remaining, terms)


def taper_state(det: ReferenceDeterminant, td: TaperingData) -> str:
    """Basis state on the remaining qubits matching det's sector expectations."""
    det_signs = sector_of(det, td.generators)
    if det_signs != td.sector_signs:
        raise ValueError(
            f"determinant sector {det_signs} does not match tapering sector "
            f"{td.sector_signs}"
        )
    removed = set(td.removed_qubits)
    bits = det.bits
    return "".join(b for q, b in enumerate(bits) if q not in removed)

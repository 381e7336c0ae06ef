"""Pauli strings and sparse Pauli sums with exact phase bookkeeping.

A string on n qubits is a pair of bit masks (x, z): bit k of each mask holds
the X/Z component of the letter acting on qubit k, decoded per qubit as
(0,0) -> I, (1,0) -> X, (1,1) -> Y, (0,1) -> Z.  Internally a string is the
Hermitian operator

    P(x, z) = i^{|x & z|} * (prod_k X_k^{x_k}) * (prod_k Z_k^{z_k}),

so products of strings are again strings times a phase in {1, i, -1, -i}.
Sums are dictionaries mapping mask pairs to complex coefficients; products of
sums are evaluated in bulk over numpy uint64 masks, which limits sums (not
strings) to 64 qubits.

Serialization convention, used project-wide: qubit 0 is the leftmost letter
of a label and the leftmost character of a measurement bitstring.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

DEFAULT_DROP_TOL = 1e-12

_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_LETTER_BITS = {v: k for k, v in _LETTERS.items()}
_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)
_PHASES_ARR = np.array(_PHASES, dtype=np.complex128)


@dataclass(frozen=True)
class PauliString:
    """One tensor product of single-qubit Pauli letters (no coefficient)."""

    n_qubits: int
    x: int
    z: int

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be non-negative")
        mask = (1 << self.n_qubits) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError(
                f"masks exceed {self.n_qubits} qubits: x={self.x:#x} z={self.z:#x}"
            )

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse a letter string like 'IXYZ' (qubit 0 leftmost); spaces ignored."""
        letters = label.replace(" ", "").upper()
        x = z = 0
        for k, ch in enumerate(letters):
            try:
                xb, zb = _LETTER_BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {ch!r} in {label!r}") from None
            x |= xb << k
            z |= zb << k
        return cls(len(letters), x, z)

    @property
    def label(self) -> str:
        return "".join(
            _LETTERS[((self.x >> k) & 1, (self.z >> k) & 1)]
            for k in range(self.n_qubits)
        )

    @property
    def support(self) -> int:
        """Mask of qubits carrying a non-identity letter."""
        return self.x | self.z

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def letter(self, k: int) -> str:
        return _LETTERS[((self.x >> k) & 1, (self.z >> k) & 1)]

    def __str__(self) -> str:
        return self.label


def multiply_strings(a: PauliString, b: PauliString) -> tuple[PauliString, complex]:
    """Product a*b as (string, phase) with phase in {1, i, -1, -i}."""
    _check_qubits(a.n_qubits, b.n_qubits)
    x = a.x ^ b.x
    z = a.z ^ b.z
    # i-exponent from normalizing X^x Z^z products back to Hermitian letters.
    e = (
        (a.x & a.z).bit_count()
        + (b.x & b.z).bit_count()
        - (x & z).bit_count()
        + 2 * (a.z & b.x).bit_count()
    ) % 4
    return PauliString(a.n_qubits, x, z), _PHASES[e]


def commutes(a: PauliString, b: PauliString) -> bool:
    """Symplectic commutation test: parity of anticommuting letter overlaps."""
    _check_qubits(a.n_qubits, b.n_qubits)
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) % 2 == 0


def qubit_wise_commutes(a: PauliString, b: PauliString) -> bool:
    """True when on every qubit the letters are equal or one side is identity."""
    _check_qubits(a.n_qubits, b.n_qubits)
    shared = (a.x | a.z) & (b.x | b.z)
    return (a.x ^ b.x) & shared == 0 and (a.z ^ b.z) & shared == 0


def _check_qubits(na: int, nb: int) -> None:
    if na != nb:
        raise ValueError(f"qubit counts differ: {na} vs {nb}")


class PauliSum:
    """Sparse complex-weighted sum of Pauli strings on a fixed qubit count.

    Instances are immutable after construction; arithmetic returns new sums.
    Coefficients with |c| <= drop_tol are discarded on construction.
    """

    __slots__ = ("n_qubits", "_terms", "_cached_arrays")

    def __init__(self, n_qubits: int, terms=None, *, drop_tol: float = DEFAULT_DROP_TOL):
        if n_qubits > 64:
            raise ValueError("PauliSum supports at most 64 qubits")
        self.n_qubits = n_qubits
        mask = (1 << n_qubits) - 1
        merged: dict[tuple[int, int], complex] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for key, coeff in items:
                if isinstance(key, PauliString):
                    _check_qubits(key.n_qubits, n_qubits)
                    key = (key.x, key.z)
                xm, zm = key
                if xm & ~mask or zm & ~mask:
                    raise ValueError("term masks exceed qubit count")
                c = merged.get((xm, zm), 0.0) + complex(coeff)
                merged[(xm, zm)] = c
        self._terms = {k: c for k, c in merged.items() if abs(c) > drop_tol}
        self._cached_arrays = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, {(0, 0): coeff})

    @classmethod
    def from_string(cls, string: PauliString, coeff: complex = 1.0) -> "PauliSum":
        return cls(string.n_qubits, {(string.x, string.z): coeff})

    @classmethod
    def from_labels(cls, n_qubits: int, labels: dict[str, complex]) -> "PauliSum":
        pairs = []
        for label, coeff in labels.items():
            s = PauliString.from_label(label)
            _check_qubits(s.n_qubits, n_qubits)
            pairs.append(((s.x, s.z), coeff))
        return cls(n_qubits, pairs)

    # -- inspection --------------------------------------------------------

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def terms(self) -> Iterator[tuple[PauliString, complex]]:
        """Terms in canonical order: lexicographic on (z_mask, x_mask)."""
        for xm, zm in sorted(self._terms, key=lambda k: (k[1], k[0])):
            yield PauliString(self.n_qubits, xm, zm), self._terms[(xm, zm)]

    def strings(self) -> list[PauliString]:
        return [s for s, _ in self.terms()]

    def coefficient(self, string: PauliString) -> complex:
        _check_qubits(string.n_qubits, self.n_qubits)
        return self._terms.get((string.x, string.z), 0.0)

    @property
    def identity_coefficient(self) -> complex:
        return self._terms.get((0, 0), 0.0)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def max_imag(self) -> float:
        return max((abs(c.imag) for c in self._terms.values()), default=0.0)

    def real_part(self, drop_tol: float = DEFAULT_DROP_TOL) -> "PauliSum":
        return PauliSum(
            self.n_qubits,
            ((k, c.real) for k, c in self._terms.items()),
            drop_tol=drop_tol,
        )

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "PauliSum") -> "PauliSum":
        _check_qubits(self.n_qubits, other.n_qubits)
        merged = dict(self._terms)
        for k, c in other._terms.items():
            merged[k] = merged.get(k, 0.0) + c
        return PauliSum(self.n_qubits, merged)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            return multiply_sums(self, other)
        return self._scaled(other)

    def __rmul__(self, scalar) -> "PauliSum":
        return self._scaled(scalar)

    def _scaled(self, scalar) -> "PauliSum":
        scalar = complex(scalar)
        return PauliSum(
            self.n_qubits, ((k, c * scalar) for k, c in self._terms.items())
        )

    # -- bulk views --------------------------------------------------------

    def mask_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Parallel (x, z, coeff) arrays in canonical order (uint64, uint64, c128)."""
        if self._cached_arrays is None:
            keys = sorted(self._terms, key=lambda k: (k[1], k[0]))
            x = np.array([k[0] for k in keys], dtype=np.uint64)
            z = np.array([k[1] for k in keys], dtype=np.uint64)
            c = np.array([self._terms[k] for k in keys], dtype=np.complex128)
            self._cached_arrays = (x, z, c)
        return self._cached_arrays

    def to_matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix; refuse beyond 16 qubits."""
        n = self.n_qubits
        if n > 16:
            raise ValueError("dense matrix limited to 16 qubits")
        dim = 1 << n
        cols = np.arange(dim, dtype=np.uint64)
        out = np.zeros((dim, dim), dtype=np.complex128)
        for (xm, zm), coeff in self._terms.items():
            phase = _PHASES[(xm & zm).bit_count() % 4] * coeff
            signs = 1.0 - 2.0 * (
                np.bitwise_count(cols & np.uint64(zm)).astype(np.int64) & 1
            )
            rows = cols ^ np.uint64(xm)
            out[rows, cols] += phase * signs
        return out

    # -- serialization -----------------------------------------------------

    def to_text(self) -> str:
        """One `coeff * LETTERS` line per term in canonical order."""
        lines = []
        for string, coeff in self.terms():
            if abs(coeff.imag) <= 1e-15:
                cs = repr(coeff.real)
            else:
                cs = repr(coeff).strip("()")
            lines.append(f"{cs} * {string.label}")
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.to_text() if self._terms else f"0 (on {self.n_qubits} qubits)"

    def __repr__(self) -> str:
        return f"PauliSum(n_qubits={self.n_qubits}, n_terms={self.n_terms})"


def parse_term(line: str) -> tuple[PauliString, complex]:
    """Parse one `coeff * LETTERS` term; spaces inside the letter block are fine."""
    if "*" not in line:
        raise ValueError(f"expected 'coeff * letters': {line!r}")
    coeff_part, _, label_part = line.partition("*")
    try:
        coeff = complex(coeff_part.strip())
    except ValueError:
        raise ValueError(f"invalid coefficient in {line!r}") from None
    return PauliString.from_label(label_part), coeff


def parse_sum(text: str, n_qubits: int | None = None) -> PauliSum:
    """Parse newline-separated terms into a PauliSum (round-trip of to_text)."""
    pairs = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        string, coeff = parse_term(line)
        if n_qubits is None:
            n_qubits = string.n_qubits
        pairs.append((string, coeff))
    if n_qubits is None:
        raise ValueError("empty Pauli-sum text and no qubit count given")
    return PauliSum(n_qubits, pairs)


def multiply_sums(
    a: PauliSum, b: PauliSum, drop_tol: float = DEFAULT_DROP_TOL
) -> PauliSum:
    """Distributed product of two sums with like-string merging.

    All |a| * |b| string products are evaluated in one vectorized pass, then
    merged; Hermitian inputs with real coefficients stay Hermitian.
    """
    _check_qubits(a.n_qubits, b.n_qubits)
    if not a._terms or not b._terms:
        return PauliSum.zero(a.n_qubits)
    xa, za, ca = a.mask_arrays()
    xb, zb, cb = b.mask_arrays()

    x = xa[:, None] ^ xb[None, :]
    z = za[:, None] ^ zb[None, :]
    ya = np.bitwise_count(xa & za).astype(np.int64)
    yb = np.bitwise_count(xb & zb).astype(np.int64)
    yab = np.bitwise_count(x & z).astype(np.int64)
    anti = np.bitwise_count(za[:, None] & xb[None, :]).astype(np.int64)
    e = (ya[:, None] + yb[None, :] - yab + 2 * anti) % 4
    coeffs = ca[:, None] * cb[None, :] * _PHASES_ARR[e]

    if a.n_qubits <= 32:
        # scalar merge keys: much faster than row-wise unique
        packed = (x.ravel() << np.uint64(32)) | z.ravel()
        uniq, inverse = np.unique(packed, return_inverse=True)
        acc = np.zeros(len(uniq), dtype=np.complex128)
        np.add.at(acc, inverse.ravel(), coeffs.ravel())
        keep = np.abs(acc) > drop_tol
        terms = {
            (int(k >> np.uint64(32)), int(k & np.uint64(0xFFFFFFFF))): c
            for k, c in zip(uniq[keep], acc[keep])
        }
    else:
        keys = np.empty((x.size, 2), dtype=np.uint64)
        keys[:, 0] = x.ravel()
        keys[:, 1] = z.ravel()
        uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
        acc = np.zeros(len(uniq), dtype=np.complex128)
        np.add.at(acc, inverse.ravel(), coeffs.ravel())
        keep = np.abs(acc) > drop_tol
        terms = {
            (int(ux), int(uz)): c
            for (ux, uz), c in zip(uniq[keep], acc[keep])
        }
    out = PauliSum(a.n_qubits)
    out._terms = terms
    return out


def allclose(a: PauliSum, b: PauliSum, tol: float = 1e-10) -> bool:
    """Coefficient-wise comparison of two sums."""
    if a.n_qubits != b.n_qubits:
        return False
    keys = set(a._terms) | set(b._terms)
    return all(
        abs(a._terms.get(k, 0.0) - b._terms.get(k, 0.0)) <= tol for k in keys
    )

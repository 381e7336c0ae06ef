"""FCIDUMP text interchange for one- and two-electron integrals.

Layout: an &FCI header carrying NORB/NELEC/MS2 (terminated by &END or /),
then `value i j k l` records with 1-based indices in chemists' notation:
four indices for (ij|kl), `i j 0 0` for h_ij, and `0 0 0 0` for the core
energy.  Fortran D exponents are accepted on read.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .chem import IntegralSet


class FcidumpError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _parse_header(lines: list[str]) -> tuple[dict, int]:
    if not lines or "&FCI" not in lines[0].upper():
        raise FcidumpError(1, "missing &FCI header")
    header_text = ""
    end_line = None
    for i, line in enumerate(lines):
        header_text += " " + line
        if "&END" in line.upper() or line.strip() == "/" or line.strip().endswith("/"):
            end_line = i
            break
    if end_line is None:
        raise FcidumpError(len(lines), "header never terminated with &END or /")
    fields = {}
    for key in ("NORB", "NELEC", "MS2"):
        m = re.search(rf"{key}\s*=\s*(-?\d+)", header_text, re.IGNORECASE)
        if m:
            fields[key] = int(m.group(1))
    if "NORB" not in fields:
        raise FcidumpError(1, "header does not define NORB")
    return fields, end_line + 1


def fcidump_read(path: str | Path) -> IntegralSet:
    """Parse an FCIDUMP file into an IntegralSet (identity overlap)."""
    lines = Path(path).read_text().splitlines()
    fields, body_start = _parse_header(lines)
    n = fields["NORB"]
    one = np.zeros((n, n))
    two = np.zeros((n, n, n, n))
    core = 0.0
    for lineno, raw in enumerate(lines[body_start:], start=body_start + 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise FcidumpError(lineno, f"expected 'value i j k l', got {line!r}")
        try:
            value = float(parts[0].upper().replace("D", "E"))
        except ValueError:
            raise FcidumpError(lineno, f"non-numeric value {parts[0]!r}") from None
        try:
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError:
            raise FcidumpError(lineno, "non-integer index") from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > n:
                raise FcidumpError(lineno, f"orbital index {idx} outside 1..{n}")
        if i == j == k == l == 0:
            core = value
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpError(lineno, "one-body record with a zero index")
            one[i - 1, j - 1] = one[j - 1, i - 1] = value
        elif 0 in (i, j, k, l):
            raise FcidumpError(lineno, "mixed zero/nonzero index pattern")
        else:
            a, b, c, d = i - 1, j - 1, k - 1, l - 1
            for p, q in ((a, b), (b, a)):
                for r, s in ((c, d), (d, c)):
                    two[p, q, r, s] = value
                    two[r, s, p, q] = value
    return IntegralSet(
        n_orbitals=n,
        core_energy=core,
        one_body=one,
        two_body=two,
        overlap=np.eye(n),
        n_electrons=fields.get("NELEC", n),
    )


def fcidump_write(
    ints: IntegralSet,
    path: str | Path,
    n_electrons: int | None = None,
    ms2: int = 0,
    threshold: float = 1e-14,
) -> None:
    """Write an IntegralSet with canonical 8-fold-unique two-body records."""
    n = ints.n_orbitals
    if n_electrons is None:
        n_electrons = ints.n_electrons
    out = [
        f"&FCI NORB={n},NELEC={n_electrons},MS2={ms2},",
        " ORBSYM=" + "1," * n,
        " ISYM=1,",
        "&END",
    ]

    def record(value: float, i: int, j: int, k: int, l: int) -> str:
        return f"{value: .16e} {i:4d} {j:4d} {k:4d} {l:4d}"

    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(i + 1):
                for l in range(k + 1):
                    if ij < k * (k + 1) // 2 + l:
                        continue
                    v = ints.two_body[i, j, k, l]
                    if abs(v) > threshold:
                        out.append(record(v, i + 1, j + 1, k + 1, l + 1))
    for i in range(n):
        for j in range(i + 1):
            v = ints.one_body[i, j]
            if abs(v) > threshold:
                out.append(record(v, i + 1, j + 1, 0, 0))
    out.append(record(ints.core_energy, 0, 0, 0, 0))
    Path(path).write_text("\n".join(out) + "\n")

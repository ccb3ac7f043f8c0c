"""Exact Gaussian elimination over F_p (numpy) and over any finite field."""

from __future__ import annotations

import numpy as np

from .ff import FieldDescriptor


def rank_mod_p(M, p: int) -> int:
    """Rank of an integer matrix over F_p."""
    A = np.array(M, dtype=np.int64) % p
    if A.ndim != 2 or A.size == 0:
        return 0
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        below = A[r + 1 :, c].copy()
        mask = below != 0
        if mask.any():
            A[r + 1 :][mask] = (A[r + 1 :][mask] - np.outer(below[mask], A[r])) % p
        r += 1
    return r


def row_reduce(rows, field: FieldDescriptor):
    """Reduced row echelon form over ``field``; returns ``(rref_rows, pivot_columns)``.

    ``rows`` is a list of lists of element encodings. Zero rows are dropped.
    """
    F = field
    R = [list(r) for r in rows]
    if not R:
        return [], []
    ncols = len(R[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(R)) if R[i][c]), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = F.inv(R[r][c])
        R[r] = [F.mul(inv, x) for x in R[r]]
        for i in range(len(R)):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == len(R):
            break
    return R[:r], pivots


def rank_over(rows, field: FieldDescriptor) -> int:
    if field.n == 1:
        return rank_mod_p(rows, field.p) if rows else 0
    return len(row_reduce(rows, field)[1])


class IncrementalBasis:
    """Echelon basis over a finite field that grows one vector at a time.

    Used for span computations where vectors arrive in batches and only the
    dimension (or membership) is needed.
    """

    def __init__(self, field: FieldDescriptor, ncols: int):
        self.F = field
        self.ncols = ncols
        self.rows: dict[int, list[int]] = {}  # pivot column -> normalised row

    def __len__(self):
        return len(self.rows)

    def reduce(self, v):
        F = self.F
        v = list(v)
        for c in range(self.ncols):
            if v[c] and c in self.rows:
                f = v[c]
                row = self.rows[c]
                v = [F.sub(x, F.mul(f, y)) if y else x for x, y in zip(v, row)]
        return v

    def add(self, v) -> bool:
        v = self.reduce(v)
        piv = next((c for c, x in enumerate(v) if x), None)
        if piv is None:
            return False
        F = self.F
        inv = F.inv(v[piv])
        v = [F.mul(inv, x) for x in v]
        self.rows[piv] = v
        return True

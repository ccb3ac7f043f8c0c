"""Integer and rational linear algebra for fans: Smith/Hermite normal forms,
saturated kernels, right inverses, and a Fourier-Motzkin feasibility solver.

Matrices are lists of lists of Python ints; everything is exact.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B):
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(A))]


def transpose(A, ncols: int | None = None):
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(r) for r in zip(*A)]


def smith_normal_form(A):
    """Return ``(D, U, V)`` with ``U @ A @ V == D`` diagonal, ``U``, ``V`` unimodular.

    The diagonal entries are non-negative and each divides the next.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(map(int, row)) for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):  # row dst += c * row src
        D[dst] = [a + c * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, c):
        for row in D:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // D[t][t]))
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // D[t][t]))
                    if D[t][j]:
                        done = False
            if done:
                # divisibility of the rest of the block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if D[i][j] % D[t][t]:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(bad, t, 1)
                continue
            # move the smallest entry of row/column t to the pivot
            best = (t, t)
            for i in range(t, m):
                if D[i][t] and abs(D[i][t]) < abs(D[best[0]][best[1]]):
                    best = (i, t)
            for j in range(t, n):
                if D[t][j] and abs(D[t][j]) < abs(D[best[0]][best[1]]):
                    best = (t, j)
            swap_rows(t, best[0])
            swap_cols(t, best[1])
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return D, U, V


def invariant_factors(A) -> list[int]:
    D, _, _ = smith_normal_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


def rank(A) -> int:
    return len(invariant_factors(A)) if A and A[0] else 0


def hermite_rows(A):
    """Row-style Hermite normal form of the row lattice of ``A`` (zero rows dropped)."""
    H = [list(map(int, r)) for r in A]
    m = len(H)
    n = len(H[0]) if m else 0
    r = 0
    for c in range(n):
        while True:
            nz = [i for i in range(r, m) if H[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[piv] = H[piv], H[r]
            others = [i for i in range(r + 1, m) if H[i][c]]
            if not others:
                break
            for i in others:
                q = H[i][c] // H[r][c]
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
        if r < m and H[r][c]:
            if H[r][c] < 0:
                H[r] = [-a for a in H[r]]
            for i in range(r):
                q = H[i][c] // H[r][c]
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
            r += 1
    return [row for row in H[:r]]


def integer_kernel(A, ncols: int) -> list[list[int]]:
    """Basis (as rows) of the saturated lattice ``{x in Z^ncols : A x = 0}``."""
    if not A:
        return identity(ncols)
    D, U, V = smith_normal_form(A)
    r = sum(1 for i in range(min(len(D), ncols)) if D[i][i])
    basis = [[V[i][j] for i in range(ncols)] for j in range(r, ncols)]
    return hermite_rows(basis) if basis else []


def right_inverse(B, prefer_columns_last: bool = True):
    """Integer ``L`` with ``B @ L == I`` or ``None`` if no such matrix exists.

    When some ``k x k`` column subset of ``B`` is unimodular, ``L`` is supported
    on that subset; subsets using later columns are preferred so that earlier
    coordinates of a lift come out as 1.
    """
    k = len(B)
    if k == 0:
        return [[] for _ in range(len(B[0]) if B else 0)]
    n = len(B[0])
    subsets = list(combinations(range(n), k))
    if prefer_columns_last:
        subsets.reverse()
    for cols in subsets:
        sub = [[B[i][j] for j in cols] for i in range(k)]
        if abs(det(sub)) == 1:
            inv = integer_inverse(sub)
            L = [[0] * k for _ in range(n)]
            for a, j in enumerate(cols):
                L[j] = inv[a]
            return L
    D, U, V = smith_normal_form(B)
    if any(D[i][i] != 1 for i in range(k)):
        return None
    # B = U^-1 [I 0] V^-1  =>  L = V [I; 0] U
    IV = [[V[i][j] for j in range(k)] for i in range(n)]
    return matmul(IV, U)


def det(A) -> int:
    n = len(A)
    if n == 0:
        return 1
    M = [[Fraction(x) for x in row] for row in A]
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            result = -result
        result *= M[c][c]
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] / M[c][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return int(result)


def integer_inverse(A):
    """Inverse of a unimodular integer matrix."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next(i for i in range(c, n) if M[i][c])
        M[c], M[piv] = M[piv], M[c]
        pv = M[c][c]
        M[c] = [a / pv for a in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    out = [[M[i][n + j] for j in range(n)] for i in range(n)]
    if any(x.denominator != 1 for row in out for x in row):
        raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in out]


def sublattice_index(vectors) -> int:
    """Index of the lattice spanned by ``vectors`` inside its saturation."""
    if not vectors:
        return 1
    f = invariant_factors(vectors)
    out = 1
    for x in f:
        out *= x
    return out


def positive_functional(vectors) -> list[int] | None:
    """Integer ``lam`` with ``lam . v >= 1`` for every ``v``, or ``None``.

    Fourier-Motzkin elimination on the system ``sum_j v_j lam_j >= 1`` in exact
    rationals, followed by back-substitution and clearing of denominators.
    """
    if not vectors:
        return []
    dim = len(vectors[0])
    if dim == 0:
        return None
    # constraint: (coeffs, rhs) meaning coeffs . lam >= rhs
    systems = []
    cons = [([Fraction(x) for x in v], Fraction(1)) for v in vectors]
    for var in range(dim - 1, -1, -1):
        systems.append(cons)
        pos, neg, zero = [], [], []
        for a, b in cons:
            (pos if a[var] > 0 else neg if a[var] < 0 else zero).append((a, b))
        new = list(zero)
        for ap, bp in pos:
            for an, bn in neg:
                lp, ln = -an[var], ap[var]
                a = [lp * x + ln * y for x, y in zip(ap, an)]
                new.append((a, lp * bp + ln * bn))
        cons = _dedupe(new)
        for a, b in cons:
            if all(x == 0 for x in a) and b > 0:
                return None
    lam = [Fraction(0)] * dim
    for var in range(dim):
        level = systems[dim - 1 - var]
        lo, hi = None, None
        for a, b in level:
            if a[var] == 0:
                continue
            rest = sum(a[j] * lam[j] for j in range(var))
            bound = (b - rest) / a[var]
            if a[var] > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is not None:
            lam[var] = lo if hi is None or lo <= hi else None
        elif hi is not None:
            lam[var] = min(Fraction(0), hi)
        if lam[var] is None:  # pragma: no cover - excluded by elimination
            return None
    den = 1
    for x in lam:
        den = den * x.denominator // gcd(den, x.denominator)
    out = [int(x * den) for x in lam]
    g = 0
    for x in out:
        g = gcd(g, x)
    # dividing by the gcd could break ">= 1"; only do it when safe
    if g > 1 and all(sum(a * b for a, b in zip(out, v)) >= g for v in vectors):
        out = [x // g for x in out]
    return out


def _dedupe(cons):
    seen = set()
    out = []
    for a, b in cons:
        key = (tuple(a), b)
        if key not in seen:
            seen.add(key)
            out.append((a, b))
    return out

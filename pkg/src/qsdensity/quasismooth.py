"""Quasismoothness tests and the local invariant nu_P(D).

A section f is quasismooth at a closed point P when its value and Cox gradient
at a lift Q of P do not all vanish. nu_P(D) is the F_q-dimension of the space
of such first-order jets realised by sections of D + kE for large k; it is
computed as a rank that is watched until it stops growing.
"""

from __future__ import annotations

import math
import warnings
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbientNotQuasismoothHere, NoStabilization, NotOnY, ValidationError
from .ff import FieldDescriptor, FieldElement, embed_value
from .linalg import rank_mod_p, row_reduce
from .points import (
    ClosedPoint,
    closed_point_counts,
    count_points,
    enumerate_closed_points,
    singular_cones,
    singular_locus_membership,
)
from .toric import Section, ToricVariety, evaluate, partial_derivative


class NuZeroWarning(UserWarning):
    """nu_P(D) = 0: every section is singular at P, so the density is zero."""


@dataclass
class AmbientSubscheme:
    """Complete intersection Y = V(g_1, ..., g_c) inside a toric variety."""

    generators: list
    codim: int | None = None
    _checked: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.generators:
            raise ValidationError("an ambient subscheme needs at least one generator")
        if self.codim is None:
            self.codim = len(self.generators)

    @property
    def variety(self) -> ToricVariety:
        return self.generators[0].variety

    @property
    def dim(self) -> int:
        return self.variety.dim - self.codim

    def contains(self, coords, K: FieldDescriptor) -> bool:
        pts = [FieldElement(K, c) for c in coords]
        return all(evaluate(g, pts).value == 0 for g in self.generators)

    def reducer(self, coords, K: FieldDescriptor):
        """RREF of the generators' Jacobian at ``coords`` (cached), with checks."""
        key = (K.n, tuple(coords))
        if key in self._checked:
            return self._checked[key]
        pts = [FieldElement(K, c) for c in coords]
        X = self.variety
        for g in self.generators:
            if evaluate(g, pts).value:
                raise NotOnY("a generator of Y does not vanish at the point")
        J = [[evaluate(partial_derivative(g, i), pts).value for i in range(X.d)] for g in self.generators]
        R, piv = row_reduce(J, K)
        if len(piv) != self.codim:
            raise AmbientNotQuasismoothHere(f"Jacobian of Y has rank {len(piv)}, expected {self.codim}")
        self._checked[key] = (R, piv)
        return R, piv


def _coords_of(Q, X: ToricVariety):
    if isinstance(Q, ClosedPoint):
        return list(Q.coords), Q.field
    if Q and isinstance(Q[0], FieldElement):
        return [c.value for c in Q], Q[0].field
    return [int(c) for c in Q], X.field


def jet_vector(f: Section, Q, Y: AmbientSubscheme | None = None) -> list[FieldElement]:
    """``(f(Q), grad f(Q))``; for proper Y the gradient is reduced modulo Y's Jacobian."""
    X = f.variety
    coords, K = _coords_of(Q, X)
    pts = [FieldElement(K, c) for c in coords]
    val = evaluate(f, pts).value
    grad = [evaluate(partial_derivative(f, i), pts).value for i in range(X.d)]
    if Y is None:
        return [FieldElement(K, x) for x in [val] + grad]
    R, piv = Y.reducer(coords, K)
    for row, c in zip(R, piv):
        if grad[c]:
            g = grad[c]
            grad = [K.sub(x, K.mul(g, y)) for x, y in zip(grad, row)]
    rest = [grad[i] for i in range(X.d) if i not in piv]
    return [FieldElement(K, x) for x in [val] + rest]


def is_quasismooth_at(f: Section, P, Y: AmbientSubscheme | None = None) -> bool:
    return any(x.value for x in jet_vector(f, P, Y))


# ---------------------------------------------------------------------------
# nu_P(D) as a stabilised rank


def _mult_matrix(K: FieldDescriptor, c: int) -> np.ndarray:
    """F_p matrix of x -> c*x on digit row vectors."""
    return np.array([K.coeffs(K.mul(K.p**j, c)) for j in range(K.n)], dtype=np.int64)


def _reduction_matrix(K: FieldDescriptor, R, piv, d: int) -> np.ndarray:
    """F_p matrix of (v, grad) -> (v, grad reduced mod rows R) restricted to non-pivot slots."""
    keep = [i for i in range(d) if i not in piv]
    n = K.n
    T = np.zeros(((1 + d) * n, (1 + len(keep)) * n), dtype=np.int64)
    T[:n, :n] = np.eye(n, dtype=np.int64)
    ident = np.eye(n, dtype=np.int64)
    for i in range(d):
        for jj, j in enumerate(keep):
            blk = ident.copy() if i == j else np.zeros((n, n), dtype=np.int64)
            # grad_j -= grad_c * R[r][j] for each pivot c = piv[r]
            for r, c in enumerate(piv):
                if c == i and R[r][j]:
                    blk = (blk - _mult_matrix(K, R[r][j])) % K.p
            T[(1 + i) * n : (2 + i) * n, (1 + jj) * n : (2 + jj) * n] = blk
    return T % K.p


def jet_matrix(X: ToricVariety, basis, coords, K: FieldDescriptor, reduce=None) -> np.ndarray:
    """F_p matrix whose row space is the F_q-span of the jets of ``basis`` monomials.

    Rows are ``t^i * jet(m)`` for a basis ``t^i`` of F_q over F_p; columns are the
    F_p digits of each jet slot. ``rank / [F_q:F_p]`` is the F_q-rank.
    """
    p = K.p
    d = X.d
    a = X.field.n
    n = K.n
    Qm = K.order - 1
    width = (1 + d) * n
    if not basis:
        out_w = width if reduce is None else reduce.shape[1]
        return np.zeros((0, out_w), dtype=np.int64)
    A = np.asarray(basis, dtype=np.int64)
    log_tab, exp_tab = K.log_exp_arrays()
    digits = K.digits_array()
    c = np.asarray(coords, dtype=np.int64)
    zero = c == 0
    lq = np.where(zero, 0, log_tab[c])
    nz_log = A[:, ~zero] @ lq[~zero] if (~zero).any() else np.zeros(len(A), dtype=np.int64)
    off_zero = A[:, zero].sum(axis=1) if zero.any() else np.zeros(len(A), dtype=np.int64)
    B = len(A)
    logs = np.full((B, 1 + d), -1, dtype=np.int64)
    scal = np.zeros((B, 1 + d), dtype=np.int64)
    ok = off_zero == 0
    logs[ok, 0] = nz_log[ok] % Qm
    scal[ok, 0] = 1
    for i in range(d):
        ci = A[:, i] % p
        if zero[i]:
            ok = (A[:, i] == 1) & (off_zero == 1)
            lg = nz_log
        else:
            ok = (off_zero == 0) & (ci != 0)
            lg = nz_log - lq[i]
        logs[ok, 1 + i] = lg[ok] % Qm
        scal[ok, 1 + i] = ci[ok]
    blocks = []
    gen = X.field.p  # encoding of the generator t of F_q over F_p
    for j in range(a):
        tj = embed_value(X.field, K, X.field.pow(gen, j)) if a > 1 else 1
        shift = int(log_tab[tj])
        L2 = np.where(logs >= 0, (logs + shift) % Qm, -1)
        vals = np.where(L2 >= 0, exp_tab[np.maximum(L2, 0)], 0)
        dig = digits[vals] * scal[:, :, None]  # (B, 1+d, n)
        blocks.append(dig.reshape(B, width) % p)
    M = np.vstack(blocks)
    if reduce is not None:
        M = (M @ reduce) % p
    return M


@dataclass(frozen=True)
class NuResult:
    value: int
    stabilized_at_k: int
    certificate: str  # "exact" | "heuristic" | "smooth"
    ranks: tuple[int, ...] = ()

    def __int__(self):
        return self.value


def nu_certified(
    P: ClosedPoint,
    D,
    E=None,
    Y: AmbientSubscheme | None = None,
    X: ToricVariety | None = None,
    stab_window: int = 3,
    k_max: int = 40,
    force_slow: bool = False,
) -> NuResult:
    """nu_P(D) with the k at which it stabilised and the kind of certificate."""
    if X is None:
        X = Y.variety if Y is not None else None
    if X is None:
        raise ValidationError("nu needs the ambient variety")
    D = X.divisor(D)
    E = X.twist if E is None else X.divisor(E)
    e = P.degree
    K = P.field
    c = 0 if Y is None else Y.codim
    dimY = X.dim - c
    reduce = None
    if Y is not None:
        R, piv = Y.reducer(P.coords, K)
        reduce = _reduction_matrix(K, R, piv, X.d)
    if not force_slow and not singular_locus_membership(P, X):
        return NuResult(e * (dimY + 1), 0, "smooth")
    bound = e * (X.d - c)
    a = X.field.n
    ranks = []
    k = 0
    while True:
        basis = X.monomial_basis(D + E * k)
        M = jet_matrix(X, basis, P.coords, K, reduce)
        rk = rank_mod_p(M, X.p) // a if len(M) else 0
        ranks.append(rk)
        if rk == bound:
            result = NuResult(rk, k, "exact", tuple(ranks))
            break
        if len(ranks) > stab_window and len(set(ranks[-stab_window - 1 :])) == 1:
            result = NuResult(rk, k - stab_window, "heuristic", tuple(ranks))
            break
        if k >= k_max:
            raise NoStabilization(f"rank still changing at k = {k_max}: {ranks[-stab_window - 1:]}")
        k += 1
    if result.value == 0:
        warnings.warn(f"nu = 0 at {P}: no section of {D} + kE is quasismooth there", NuZeroWarning, stacklevel=2)
    return result


def nu(P: ClosedPoint, D, E=None, Y=None, X=None, **kw) -> int:
    return nu_certified(P, D, E, Y, X, **kw).value


# ---------------------------------------------------------------------------
# profiles


@dataclass
class NuProfile:
    """Multiset of (degree, nu) over the closed points of Y of degree <= depth.

    ``classes[(e, nu)]`` counts points; ``singular`` counts the subset lying
    in the singular locus of X. ``points`` keeps the explicitly computed ones.
    """

    q: int
    depth: int
    dim: int
    classes: dict = field(default_factory=dict)
    singular: dict = field(default_factory=dict)
    points: list = field(default_factory=list)

    @classmethod
    def from_pairs(cls, q: int, dim: int, pairs, depth: int | None = None) -> "NuProfile":
        classes = defaultdict(int)
        for e, v in pairs:
            classes[(e, v)] += 1
        depth = depth if depth is not None else max((e for e, _ in classes), default=0)
        return cls(q, depth, dim, dict(classes))

    def items(self):
        """``(degree, nu, count)`` sorted by degree then nu."""
        return [(e, v, c) for (e, v), c in sorted(self.classes.items()) if c]

    def count(self, e: int) -> int:
        return sum(c for (d, _), c in self.classes.items() if d == e)

    @property
    def size(self) -> int:
        return sum(self.classes.values())

    @property
    def has_zero(self) -> bool:
        return any(v == 0 and c for (_, v), c in self.classes.items())

    def nu_values(self, e: int) -> dict:
        return {v: c for (d, v), c in self.classes.items() if d == e and c}

    def truncate(self, r: int) -> "NuProfile":
        keep = lambda dct: {k: v for k, v in dct.items() if k[0] <= r}
        pts = [t for t in self.points if t[0].degree <= r]
        return NuProfile(self.q, min(r, self.depth), self.dim, keep(self.classes), keep(self.singular), pts)


def nu_profile(
    X: ToricVariety,
    Y: AmbientSubscheme | None,
    D,
    E=None,
    max_degree: int = 3,
    stab_window: int = 3,
    k_max: int = 40,
) -> NuProfile:
    """nu for every closed point of Y of degree <= max_degree.

    With Y = X only points of the singular locus are enumerated; the smooth
    locus is accounted for by point counts, every such point having
    nu = deg P (dim X + 1).
    """
    D = X.divisor(D)
    classes: dict = defaultdict(int)
    sing: dict = defaultdict(int)
    pts = []
    kw = dict(stab_window=stab_window, k_max=k_max)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NuZeroWarning)
        if Y is None:
            scones = singular_cones(X)
            for e in range(1, max_degree + 1):
                total = closed_point_counts([count_points(X, r) for r in range(1, e + 1)])[-1]
                bad = closed_point_counts([count_points(X, r, cones=scones) for r in range(1, e + 1)])[-1]
                if total - bad:
                    classes[(e, e * (X.dim + 1))] += total - bad
            for P in enumerate_closed_points(X, max_degree, cones=scones):
                res = nu_certified(P, D, E, None, X, **kw)
                classes[(P.degree, res.value)] += 1
                sing[(P.degree, res.value)] += 1
                pts.append((P, res))
        else:
            for P in enumerate_closed_points(X, max_degree):
                if not Y.contains(P.coords, P.field):
                    continue
                res = nu_certified(P, D, E, Y, X, **kw)
                classes[(P.degree, res.value)] += 1
                if P.singular:
                    sing[(P.degree, res.value)] += 1
                pts.append((P, res))
    dim = X.dim if Y is None else Y.dim
    if any(v == 0 for (_, v) in classes):
        warnings.warn("profile contains points with nu = 0; the density is zero", NuZeroWarning, stacklevel=2)
    return NuProfile(X.q, max_degree, dim, dict(classes), dict(sing), pts)


@dataclass(frozen=True)
class BetaEstimate:
    m: int
    counts: tuple[int, ...]  # closed points of degree e with nu = m e, e = 1..depth
    estimate: float | None
    holds: bool


def beta_diagnostic(profile: NuProfile) -> dict[int, BetaEstimate]:
    """Estimated dimension of each locus {nu_P = m deg P}, flagged against beta_m < m.

    Closed-point counts c_e are turned into point counts N_e = sum_{j | e} j c_j
    of the locus over F_{q^e}; the estimate is the least-squares slope of
    log_q N_e in e. The flag uses a margin of one half.
    """
    q = profile.q
    r = profile.depth
    ms = sorted({v // e for (e, v), c in profile.classes.items() if c and v % e == 0})
    out = {}
    for m in ms:
        c = [profile.classes.get((e, m * e), 0) for e in range(1, r + 1)]
        N = [sum(j * c[j - 1] for j in range(1, e + 1) if e % j == 0) for e in range(1, r + 1)]
        pts = [(e, math.log(n, q)) for e, n in zip(range(1, r + 1), N) if n > 0]
        if not pts:
            est = None
        elif len(pts) == 1:
            est = pts[0][1] / pts[0][0]
        else:
            xs = np.array([x for x, _ in pts], dtype=float)
            ys = np.array([y for _, y in pts], dtype=float)
            est = float(np.polyfit(xs, ys, 1)[0])
        holds = est is None or est < m - 0.5
        out[m] = BetaEstimate(m, tuple(c), est, holds)
    return out

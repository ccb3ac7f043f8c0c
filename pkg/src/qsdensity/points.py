"""Point counts and closed points of split toric varieties over F_q.

A toric variety is the disjoint union of torus orbits O(tau), one per cone,
and O(tau) is a torus of dimension n - dim tau. Counting is therefore a sum
of powers of (q^r - 1). Closed points are enumerated orbit by orbit in
discrete-log form: Frobenius multiplies every torus log by q, so orbit sizes
and canonical representatives come out of plain integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import lattice
from .errors import CapExceeded, NonIntegralCount, UnsupportedTorsion
from .ff import FieldDescriptor, FieldElement, TABLE_LIMIT, divisors, make_field, prime_factors
from .toric import Fan, ToricVariety


def mobius(n: int) -> int:
    out = 1
    for p in prime_factors(n):
        if n % (p * p) == 0:
            return 0
        out = -out
    return out


def _fan_of(X) -> Fan:
    return X.fan if isinstance(X, ToricVariety) else X


def count_points(X, r: int, q: int | None = None, cones=None) -> int:
    """``#X(F_{q^r})`` as a sum over cones of ``(q^r - 1)^(n - dim cone)``.

    ``X`` is a variety or a bare fan (then ``q`` is required). ``cones``
    restricts the sum to a union of orbits.
    """
    fan = _fan_of(X)
    if q is None:
        q = X.q
    Q = q**r
    cones = fan.cones if cones is None else cones
    return sum((Q - 1) ** (fan.n - len(c)) for c in cones)


def closed_point_counts(N) -> list[int]:
    """Moebius inversion: ``a[e-1]`` = number of closed points of degree e from ``N[r-1]``."""
    N = list(N)
    out = []
    for e in range(1, len(N) + 1):
        s = sum(mobius(m) * N[e // m - 1] for m in divisors(e))
        if s % e:
            raise NonIntegralCount(f"point counts are inconsistent at degree {e}")
        out.append(s // e)
    return out


@dataclass(frozen=True)
class PointCounts:
    q: int
    N: tuple[int, ...]
    a: tuple[int, ...]

    @property
    def depth(self) -> int:
        return len(self.N)


def point_counts(X: ToricVariety, R: int, cones=None) -> PointCounts:
    N = tuple(count_points(X, r, cones=cones) for r in range(1, R + 1))
    return PointCounts(X.q, N, tuple(closed_point_counts(N)))


def singular_cones(X) -> tuple[tuple[int, ...], ...]:
    fan = _fan_of(X)
    return tuple(c for c in fan.cones if not fan.is_smooth_cone(c))


def singular_locus_counts(X: ToricVariety, R: int) -> PointCounts:
    """Counts restricted to the singular locus of X (orbits of non-smooth cones)."""
    return point_counts(X, R, cones=singular_cones(X))


# ---------------------------------------------------------------------------
# closed points


@dataclass(frozen=True)
class ClosedPoint:
    """Degree-e closed point with Cox coordinates over ``field`` = F_{q^e}.

    ``torus`` holds the discrete logs of the orbit-torus characters; it
    determines the point and is what Frobenius acts on.
    """

    degree: int
    cone: int
    coords: tuple[int, ...]
    field: FieldDescriptor = field(repr=False)
    torus: tuple[int, ...] = ()
    singular: bool = False

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self.field, c) for c in self.coords]

    def conjugates(self, base_degree: int) -> list[tuple[int, ...]]:
        """Cox coordinates of the Frobenius conjugates (x -> x^q with q = p^base_degree)."""
        K = self.field
        out = [self.coords]
        for j in range(1, self.degree):
            out.append(tuple(K.frobenius(c, base_degree * j) for c in self.coords))
        return out

    def __str__(self):
        inner = ":".join(repr(x) for x in self.elements())
        return f"({inner})" + (f"[deg {self.degree}]" if self.degree > 1 else "")


@dataclass(frozen=True)
class _OrbitChart:
    cone: tuple[int, ...]
    free: tuple[int, ...]  # rays not in the cone, i.e. nonzero coordinates
    B: tuple[tuple[int, ...], ...]  # character pairings, (n-k) x (d-k)
    L: tuple[tuple[int, ...], ...]  # right inverse, (d-k) x (n-k)


@lru_cache(maxsize=None)
def _orbit_chart(fan: Fan, cone: tuple[int, ...]) -> _OrbitChart:
    n = fan.n
    free = tuple(i for i in range(fan.d) if i not in cone)
    if cone:
        chars = lattice.integer_kernel([list(fan.rays[i]) for i in cone], n)
    else:
        chars = lattice.identity(n)
    B = [[sum(u[t] * fan.rays[i][t] for t in range(n)) for i in free] for u in chars]
    if not B:
        return _OrbitChart(cone, free, (), tuple(() for _ in free))
    L = lattice.right_inverse(B)
    if L is None:
        raise UnsupportedTorsion(f"orbit of cone {cone} has no rational Cox lift")
    return _OrbitChart(cone, free, tuple(map(tuple, B)), tuple(map(tuple, L)))


def extension_field(X: ToricVariety, e: int) -> FieldDescriptor:
    return make_field(X.p, X.field.n * e)


def _rank_table(K: FieldDescriptor) -> np.ndarray:
    """Position of every element in the coefficient-list order (low-to-high)."""
    digits = K.digits_array()
    weights = K.p ** np.arange(K.n - 1, -1, -1, dtype=np.int64)
    return digits @ weights


def _lex_less(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    res = np.zeros(A.shape[0], dtype=bool)
    for i in range(A.shape[1] - 1, -1, -1):
        res = (A[:, i] < B[:, i]) | ((A[:, i] == B[:, i]) & res)
    return res


ENUMERATION_LIMIT = 20_000_000


def closed_point_block(X: ToricVariety, cone: tuple[int, ...], e: int):
    """Closed points of exact degree e in the orbit of ``cone``.

    Returns ``(K, torus_logs, coords)`` where ``coords`` is an ``(M, d)`` array of
    element encodings of F_{q^e} (one canonical lift per closed point).
    """
    if X.class_group.has_torsion:
        raise UnsupportedTorsion("closed-point enumeration needs a torsion-free class group")
    K = extension_field(X, e)
    if K.order > TABLE_LIMIT:
        raise CapExceeded(f"closed points of degree {e} need F_{K.order}, beyond the vectorised limit {TABLE_LIMIT}")
    q = X.q
    Qm = K.order - 1
    chart = _orbit_chart(X.fan, tuple(cone))
    t = len(chart.B)
    d = X.d
    if t == 0:
        if e != 1:
            return K, np.zeros((0, 0), dtype=np.int64), np.zeros((0, d), dtype=np.int64)
        coords = np.ones((1, d), dtype=np.int64)
        coords[0, list(chart.cone)] = 0
        return K, np.zeros((1, 0), dtype=np.int64), coords
    total = Qm**t
    if total > ENUMERATION_LIMIT:
        raise CapExceeded(f"orbit of cone {cone} has {total} torus points over F_{K.order}")
    logs = np.indices((Qm,) * t, dtype=np.int64).reshape(t, -1).T
    # exact orbit size e: not fixed by Frobenius^(e/l) for any prime l | e
    keep = np.ones(len(logs), dtype=bool)
    for ell in set(prime_factors(e)):
        step = pow(q, e // ell) - 1
        keep &= ~np.all((logs * step) % Qm == 0, axis=1)
    logs = logs[keep]
    log_tab, exp_tab = K.log_exp_arrays()
    L = np.array(chart.L, dtype=np.int64)
    ranks = _rank_table(K)

    def lift(lg):
        return exp_tab[(lg @ L.T) % Qm]

    own = lift(logs)
    is_min = np.ones(len(logs), dtype=bool)
    own_rank = ranks[own]
    for j in range(1, e):
        conj = lift((logs * pow(q, j, Qm)) % Qm)
        is_min &= ~_lex_less(ranks[conj], own_rank)
    logs = logs[is_min]
    free_coords = own[is_min]
    coords = np.zeros((len(logs), d), dtype=np.int64)
    coords[:, list(chart.free)] = free_coords
    return K, logs, coords


def enumerate_closed_points(X: ToricVariety, max_degree: int, cones=None, min_degree: int = 1):
    """Iterate over one canonical representative per closed point of degree <= max_degree.

    Order: by degree, then cone (in ``fan.cones`` order), then torus logs.
    """
    fan = X.fan
    cones = fan.cones if cones is None else tuple(tuple(c) for c in cones)
    smooth = {c: fan.is_smooth_cone(c) for c in cones}
    for e in range(min_degree, max_degree + 1):
        for c in cones:
            K, logs, coords = closed_point_block(X, c, e)
            ci = fan.cone_index[c]
            for lg, row in zip(logs.tolist(), coords.tolist()):
                yield ClosedPoint(e, ci, tuple(row), K, tuple(lg), not smooth[c])


def closed_points(X: ToricVariety, max_degree: int, cones=None) -> list[ClosedPoint]:
    return list(enumerate_closed_points(X, max_degree, cones))


def singular_locus_membership(P: ClosedPoint, X) -> bool:
    fan = _fan_of(X)
    return not fan.is_smooth_cone(fan.cones[P.cone])


def point_from_coords(X: ToricVariety, coords, degree: int | None = None) -> ClosedPoint:
    """Closed point through given Cox coordinates (ints, or FieldElements over some F_{q^e}).

    The degree is the size of the Frobenius orbit of the point of X, found by
    comparing torus characters; the stored coordinates are the canonical lift.
    """
    fan = X.fan
    if coords and isinstance(coords[0], FieldElement):
        K = coords[0].field
        vals = [c.value for c in coords]
    else:
        K = X.field
        vals = [int(c) for c in coords]
    if not X.is_relevant(vals):
        raise ValueError("coordinates lie in the irrelevant locus")
    zero = tuple(i for i, v in enumerate(vals) if v == 0)
    cone = next(c for c in fan.cones if set(c) == set(zero))
    chart = _orbit_chart(fan, cone)
    e_field = K.n // X.field.n
    log_tab, _ = K.log_exp_arrays()
    Qm = K.order - 1
    xlogs = [int(log_tab[vals[i]]) for i in chart.free]
    tl = tuple(sum(b * x for b, x in zip(row, xlogs)) % Qm for row in chart.B)
    deg = 1
    q = X.q
    while any((x * (q**deg - 1)) % Qm for x in tl):
        deg += 1
    if degree is not None and degree != deg:
        raise ValueError(f"point has degree {deg}, not {degree}")
    # move into F_{q^deg} and pick the canonical representative
    Kd = extension_field(X, deg)
    for P in enumerate_closed_points(X, deg, cones=[cone], min_degree=deg):
        for conj in P.conjugates(X.field.n):
            if _same_point(X, chart, conj, Kd, vals, K):
                return P
    raise AssertionError("point not found among enumerated representatives")  # pragma: no cover


def _same_point(X, chart, a_coords, Ka, b_coords, Kb) -> bool:
    """Do two Cox tuples (over possibly different fields) have equal torus characters?"""
    from .ff import embed_value

    big = Ka if Ka.n >= Kb.n else Kb
    if big.n % Ka.n or big.n % Kb.n:
        big = make_field(X.p, Ka.n * Kb.n)
    A = [embed_value(Ka, big, a_coords[i]) for i in chart.free]
    B = [embed_value(Kb, big, b_coords[i]) for i in chart.free]
    for row in chart.B:
        va = vb = 1
        for bexp, x, y in zip(row, A, B):
            va = big.mul(va, big.pow(x, bexp))
            vb = big.mul(vb, big.pow(y, bexp))
        if va != vb:
            return False
    return True

"""Truncated local rings at smooth points and lengths of singular schemes.

For a smooth closed point P of degree m, a section f is read in the affine
chart of a smooth maximal cone containing P, base-changed to K = F_{q^m} and
translated so that P sits at the origin. The singular scheme of f at P is
K[[y]] / (g, dg/dy_1, ..., dg/dy_n); its length over K is computed from
truncations: if the quotient by m^E and by m^(E-1) have the same dimension,
Nakayama's lemma shows the ideal already contains m^(E-1), so that dimension
is the length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from .errors import CapExceeded, NotSmooth, ValidationError
from .ff import FieldDescriptor, embed_value, make_field
from .linalg import rank_mod_p
from .points import ClosedPoint
from .toric import Section, ToricVariety, partial_derivative

Monomial = tuple[int, ...]


@lru_cache(maxsize=None)
def monomials_below(n: int, e: int) -> tuple[Monomial, ...]:
    """Exponent vectors of total degree < e in n variables, by degree then lex (descending)."""
    out = []
    for deg in range(e):
        out.extend(_of_degree(n, deg))
    return tuple(out)


def _of_degree(n: int, deg: int):
    if n == 1:
        return [(deg,)]
    out = []
    for a in range(deg, -1, -1):
        out.extend((a,) + rest for rest in _of_degree(n - 1, deg - a))
    return out


@lru_cache(maxsize=None)
def _index(n: int, e: int) -> dict:
    return {m: i for i, m in enumerate(monomials_below(n, e))}


@dataclass(frozen=True)
class Unstable:
    """Length not determined at this truncation; it is at least ``lower_bound``."""

    lower_bound: int

    def __bool__(self):
        return False


class JetRing:
    """K[y_1, ..., y_n] / m^e with elements stored as dicts {exponent: encoding}."""

    def __init__(self, field: FieldDescriptor, n: int, e: int):
        self.K = field
        self.n = n
        self.e = e

    @property
    def dimension(self) -> int:
        return math.comb(self.n + self.e - 1, self.n)

    @property
    def basis(self) -> tuple[Monomial, ...]:
        return monomials_below(self.n, self.e)

    def truncate(self, f: dict, e: int | None = None) -> dict:
        e = self.e if e is None else e
        return {m: c for m, c in f.items() if c and sum(m) < e}

    def add(self, f: dict, g: dict) -> dict:
        out = dict(f)
        for m, c in g.items():
            out[m] = self.K.add(out.get(m, 0), c)
        return {m: c for m, c in out.items() if c}

    def mul(self, f: dict, g: dict) -> dict:
        K = self.K
        out: dict = {}
        for a, x in f.items():
            for b, y in g.items():
                m = tuple(i + j for i, j in zip(a, b))
                if sum(m) < self.e:
                    out[m] = K.add(out.get(m, 0), K.mul(x, y))
        return {m: c for m, c in out.items() if c}

    def partial(self, f: dict, i: int) -> dict:
        """Formal derivative; the result is only meaningful modulo m^(e-1)."""
        K = self.K
        out = {}
        for m, c in f.items():
            if m[i] % K.p:
                b = list(m)
                b[i] -= 1
                out[tuple(b)] = K.scalar(m[i], c)
        return {m: c for m, c in out.items() if c}

    def from_vector(self, v) -> dict:
        return {m: int(c) for m, c in zip(self.basis, v) if c}

    def to_vector(self, f: dict) -> list[int]:
        idx = _index(self.n, self.e)
        v = [0] * len(idx)
        for m, c in f.items():
            if sum(m) < self.e:
                v[idx[m]] = c
        return v


def _rank_K(rows: np.ndarray, K: FieldDescriptor) -> int:
    """Rank over K of a matrix of element encodings (via F_p digits)."""
    if rows.size == 0:
        return 0
    if K.n == 1:
        return rank_mod_p(rows, K.p)
    log_tab, exp_tab = K.log_exp_arrays()
    digits = K.digits_array()
    Qm = K.order - 1
    lg = log_tab[rows]
    t_log = int(log_tab[K.p])
    blocks = []
    for i in range(K.n):
        vals = np.where(rows != 0, exp_tab[(lg + i * t_log) % Qm], 0)
        blocks.append(digits[vals].reshape(rows.shape[0], -1))
    return rank_mod_p(np.vstack(blocks), K.p) // K.n


def quotient_dimension(gens, K: FieldDescriptor, n: int, E: int) -> int:
    """dim_K of K[y]/(gens + m^E); generators need only be correct modulo m^E."""
    mons = monomials_below(n, E)
    idx = _index(n, E)
    rows = []
    for g in gens:
        g = {m: c for m, c in g.items() if c and sum(m) < E}
        if not g:
            continue
        low = min(sum(m) for m in g)
        for b in mons:
            if sum(b) + low >= E:
                continue
            row = [0] * len(mons)
            for m, c in g.items():
                s = tuple(i + j for i, j in zip(m, b))
                if sum(s) < E:
                    row[idx[s]] = c
            rows.append(row)
    if not rows:
        return len(mons)
    return len(mons) - _rank_K(np.asarray(rows, dtype=np.int64), K)


def local_length(jet: dict, partials, e: int, K: FieldDescriptor, n: int | None = None):
    """Length of K[[y]]/(jet, partials) when determined by data modulo m^e.

    ``jet`` and ``partials`` must be correct modulo m^e. Returns an int, or
    :class:`Unstable` with the dimension at order e as a lower bound.
    """
    if n is None:
        n = len(next(iter(jet))) if jet else len(partials)
    gens = [jet] + list(partials)
    if jet.get((0,) * n, 0):
        return 0
    if any(p.get((0,) * n, 0) for p in partials):
        return 0
    hi = quotient_dimension(gens, K, n, e)
    lo = quotient_dimension(gens, K, n, e - 1) if e > 1 else hi
    if e > 1 and hi == lo:
        return hi
    return Unstable(hi)


def jet_length(jet: dict, K: FieldDescriptor, n: int, e: int):
    """Length from a jet known modulo m^e alone (its partials are known modulo m^(e-1))."""
    R = JetRing(K, n, e)
    return local_length(R.truncate(jet, e - 1), [R.truncate(R.partial(jet, i), e - 1) for i in range(n)], e - 1, K, n)


# ---------------------------------------------------------------------------
# charts


def chart_cone(X: ToricVariety, P: ClosedPoint) -> tuple[int, ...]:
    fan = X.fan
    zeros = set(fan.cones[P.cone])
    for c in fan.max_cones:
        if zeros <= set(c) and fan.is_smooth_cone(c):
            return c
    raise NotSmooth(f"{P} lies in no smooth chart")


def normalized_lift(X: ToricVariety, P: ClosedPoint, cone) -> list[int]:
    """Lift of P with x_j = 1 for every ray j outside the chart cone."""
    K = P.field
    log_tab, exp_tab = K.log_exp_arrays()
    Qm = K.order - 1
    out_idx = [j for j in range(X.d) if j not in cone]
    G = [list(X.grading[j].free) for j in out_idx]
    from .lattice import integer_inverse

    Ginv = integer_inverse(G)  # rows of G are a basis of Cl for a smooth cone
    target = [(-int(log_tab[P.coords[j]])) % Qm for j in out_idx]
    # lam with sum_t G[j][t] lam_t = target_j
    lam = [sum(Ginv[t][j] * target[j] for j in range(len(out_idx))) % Qm for t in range(len(G))]
    coords = []
    for i in range(X.d):
        c = P.coords[i]
        if c == 0:
            coords.append(0)
            continue
        shift = sum(g * l for g, l in zip(X.grading[i].free, lam)) % Qm
        coords.append(int(exp_tab[(int(log_tab[c]) + shift) % Qm]))
    return coords


def _taylor(f: Section, coords, cone, K: FieldDescriptor, e: int) -> dict:
    """Taylor jet of f at the normalised lift, in the chart variables y_i (i in cone)."""
    X = f.variety
    R = JetRing(K, len(cone), e)
    out: dict = {}
    for alpha, c in f.terms().items():
        term = {(0,) * len(cone): embed_value(X.field, K, c)}
        for t, i in enumerate(cone):
            k = alpha[i]
            if not k:
                continue
            a = coords[i]
            uni = {}
            for s in range(min(k, e - 1) + 1):
                b = math.comb(k, s) % K.p
                if b:
                    val = K.scalar(b, K.pow(a, k - s)) if (k - s == 0 or a) else 0
                    if val:
                        m = [0] * len(cone)
                        m[t] = s
                        uni[tuple(m)] = val
            term = R.mul(term, uni)
            if not term:
                break
        out = R.add(out, term)
    return out


def section_jet(f: Section, P: ClosedPoint, e: int):
    """``(jet, partials, K, n)`` of f at P in local chart coordinates, all modulo m^e."""
    X = f.variety
    cone = chart_cone(X, P)
    coords = normalized_lift(X, P, cone)
    K = P.field
    jet = _taylor(f, coords, cone, K, e)
    partials = [_taylor(partial_derivative(f, i), coords, cone, K, e) for i in cone]
    return jet, partials, K, len(cone)


def singular_length(f: Section, P: ClosedPoint, e: int = 3, e_max: int = 8):
    """Length over the residue field of the singular scheme of f at P, escalating e."""
    while True:
        jet, partials, K, n = section_jet(f, P, e)
        res = local_length(jet, partials, e, K, n)
        if not isinstance(res, Unstable) or e >= e_max:
            return res
        e += 1


# ---------------------------------------------------------------------------
# jet densities


@dataclass
class MuTable:
    """mu(a) for a <= a_max at points of one degree, plus the remaining mass."""

    q: int
    point_degree: int
    a_max: int
    order: int
    method: str
    mu: dict = field(default_factory=dict)  # a -> Fraction
    overflow: Fraction = Fraction(0)
    ci: dict = field(default_factory=dict)  # a -> (lo, hi), Monte Carlo only
    samples: int = 0

    def __call__(self, a: int, degree: int | None = None) -> Fraction:
        if degree is not None and degree != self.point_degree:
            raise ValidationError(f"table is for degree {self.point_degree} points")
        return self.mu[a]

    def rows(self):
        out = []
        for a in sorted(self.mu):
            lo, hi = self.ci.get(a, (None, None))
            half = None if lo is None else (hi - lo) / 2
            out.append((a, self.mu[a], self.method, half))
        return out


def _local_dim(X: ToricVariety) -> int:
    if not X.is_smooth:
        raise NotSmooth("jet densities need a smooth variety")
    return X.dim


ENUMERATION_CAP = 2_000_000


def mu_exhaustive(point_degree: int, X: ToricVariety, a_max: int = 1, e: int | None = None, e_max: int = 8) -> MuTable:
    """Exact mu(a), a <= a_max, by enumerating all jets modulo m^e over F_{q^m}.

    Jets whose constant or linear part is nonzero have length 0 and are counted
    without enumeration. A jet that stays unstable with a lower bound <= a_max
    forces a restart with e + 1.
    """
    n = _local_dim(X)
    K = make_field(X.p, X.field.n * point_degree)
    Qo = K.order
    e = a_max + 2 if e is None else e
    while True:
        N = math.comb(n + e - 1, n)
        tail_dim = N - 1 - n
        if Qo**tail_dim > ENUMERATION_CAP:
            raise CapExceeded(
                f"{Qo}^{tail_dim} jets to enumerate; use mu_monte_carlo for this size"
            )
        mons = monomials_below(n, e)[1 + n :]
        counts = {a: 0 for a in range(a_max + 1)}
        over = 0
        retry = False
        for vals in iproduct(range(Qo), repeat=tail_dim):
            jet = {m: v for m, v in zip(mons, vals) if v}
            res = jet_length(jet, K, n, e)
            if isinstance(res, Unstable):
                if res.lower_bound <= a_max:
                    retry = True
                    break
                over += 1
            elif res <= a_max:
                counts[res] += 1
            else:
                over += 1
        if not retry:
            break
        if e >= e_max:
            raise CapExceeded(f"jets still unstable at order {e_max}")
        e += 1
    total = Qo**N
    heads = total - Qo**tail_dim
    mu = {a: Fraction(c, Qo**tail_dim) * Fraction(Qo**tail_dim, total) for a, c in counts.items()}
    mu[0] += Fraction(heads, total)
    return MuTable(X.q, point_degree, a_max, e, "exhaustive", mu, Fraction(over, total))


def mu_monte_carlo(
    point_degree: int, X: ToricVariety, a_max: int = 1, e: int | None = None, samples: int = 1000, seed: int = 0
) -> MuTable:
    """Frequency estimates of mu(a) from uniform random jets, with 95% Wilson intervals.

    Unstable jets whose lower bound is <= a_max are counted as overflow.
    """
    n = _local_dim(X)
    K = make_field(X.p, X.field.n * point_degree)
    e = a_max + 2 if e is None else e
    table = MuTable(X.q, point_degree, a_max, e, f"monte-carlo({samples})", samples=samples)
    if samples <= 0:
        return table
    rng = np.random.default_rng(seed)
    mons = monomials_below(n, e)
    draws = rng.integers(0, K.order, size=(samples, len(mons)))
    counts = {a: 0 for a in range(a_max + 1)}
    over = 0
    for row in draws:
        jet = {m: int(v) for m, v in zip(mons, row) if v}
        res = jet_length(jet, K, n, e)
        if isinstance(res, Unstable) or res > a_max:
            over += 1
        else:
            counts[res] += 1
    for a, c in counts.items():
        table.mu[a] = Fraction(c, samples)
        lo, hi = proportion_confint(c, samples, alpha=0.05, method="wilson")
        table.ci[a] = (float(lo), float(hi))
    table.overflow = Fraction(over, samples)
    return table

"""Truncated Euler products for densities of quasismooth sections.

Every density here is a product over closed points truncated at degree r.
Points are grouped into classes (degree, nu) so that a class of c points
contributes one factor raised to the c-th power, and generating polynomials
in x are truncated at x^s. Values are exact fractions whenever the numbers
involved stay small; very large products (q = 5, r = 12 has ~10^15 points in
the top degree) are evaluated with 60-digit logarithms and flagged inexact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct

import mpmath

from .errors import CapExceeded, DivergentRegion, NotSmooth, ValidationError, ZeroNu
from .points import point_counts
from .quasismooth import NuProfile
from .toric import ToricVariety

EXACT_BITS = 200_000  # beyond this many denominator bits switch to mpmath
MP_DIGITS = 60
TAIL_TERMS = 40


@dataclass(frozen=True)
class TruncatedDensity:
    value: Fraction
    truncation_degree: int
    tail_bound: Fraction
    formula_id: str
    heuristic: bool = True
    exact: bool = True
    rounding_error: Fraction = Fraction(0)
    details: dict = field(default_factory=dict, compare=False)

    def __float__(self):
        return float(self.value)

    def interval(self) -> tuple[float, float]:
        v = float(self.value)
        w = float(self.tail_bound + self.rounding_error)
        return max(0.0, v - w), min(1.0, v + w)

    def to_json(self, decimals: int = 12) -> dict:
        return {
            "value_rational": f"{self.value.numerator}/{self.value.denominator}" if self.exact else None,
            "value_decimal": round(float(self.value), decimals),
            "tail_halfwidth": float(self.tail_bound),
            "rounding_error": float(self.rounding_error),
            "heuristic": self.heuristic,
            "exact": self.exact,
            "r": self.truncation_degree,
            "formula": self.formula_id,
        }


def _mpf_to_fraction(x) -> Fraction:
    man, exp = int(x.man), int(x.exp)
    return Fraction(man) * (Fraction(2) ** exp)


class _Product:
    """Accumulates prod (1 - q^-nu)^count exactly, or in log space when too large."""

    def __init__(self, q: int):
        self.q = q
        self.factors: list[tuple[int, int]] = []  # (nu, count)
        self.zero = False

    def add(self, nu: int, count: int):
        if count == 0:
            return
        if nu == 0:
            self.zero = True
        self.factors.append((nu, count))

    def bits(self) -> float:
        return sum(c * v * math.log2(self.q) for v, c in self.factors)

    def value(self) -> tuple[Fraction, bool, Fraction]:
        if self.zero:
            return Fraction(0), True, Fraction(0)
        if self.bits() <= EXACT_BITS:
            num, den = 1, 1
            for v, c in self.factors:
                Q = self.q**v
                num *= (Q - 1) ** c
                den *= Q**c
            return Fraction(num, den), True, Fraction(0)
        with mpmath.workdps(MP_DIGITS):
            s = mpmath.mpf(0)
            for v, c in self.factors:
                s += c * mpmath.log1p(-mpmath.mpf(self.q) ** (-v))
            val = mpmath.exp(s)
            return _mpf_to_fraction(val), False, Fraction(1, 10 ** (MP_DIGITS - 10))


def _tail(q: int, dim: int, counts, r: int, s_exp: int) -> Fraction:
    """Sum_{r < e <= r+40} c q^(e dim) q^(-e s_exp) with c = 2 max_e a_e / q^(e dim)."""
    if not counts:
        return Fraction(0)
    c = 2 * max(Fraction(a, q ** (e * dim)) for e, a in enumerate(counts, start=1))
    return sum((c * Fraction(q ** (e * dim), q ** (e * s_exp)) for e in range(r + 1, r + 1 + TAIL_TERMS)), Fraction(0))


def main_density(profile: NuProfile) -> TruncatedDensity:
    """prod over the profile of (1 - q^-nu_P); zero when some nu_P = 0."""
    q = profile.q
    prod = _Product(q)
    for e, v, c in profile.items():
        prod.add(v, c)
    value, exact, err = prod.value()
    counts = [profile.count(e) for e in range(1, profile.depth + 1)]
    tail = Fraction(0) if prod.zero else _tail(q, profile.dim, counts, profile.depth, profile.dim + 1)
    return TruncatedDensity(value, profile.depth, tail, "main", True, exact, err)


def _variety_counts(X: ToricVariety, r: int):
    return point_counts(X, r).a if r > 0 else ()


def zeta_inverse(X: ToricVariety, s: int, r: int) -> TruncatedDensity:
    """Truncation of 1/zeta_X(s) = prod_{e <= r} (1 - q^(-s e))^(a_e)."""
    if s <= X.dim:
        raise DivergentRegion(f"s = {s} is not above dim X = {X.dim}")
    q = X.q
    a = _variety_counts(X, r)
    prod = _Product(q)
    for e, c in enumerate(a, start=1):
        prod.add(s * e, c)
    value, exact, err = prod.value()
    tail = _tail(q, X.dim, list(a), r, s)
    return TruncatedDensity(value, r, tail, "zeta_inverse", True, exact, err)


def _trunc_mul(f, g, s):
    out = [Fraction(0)] * s
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g[: s - i]):
                out[i + j] += a * b
    return out


def _trunc_power(g, c: int, s: int):
    """(1 + g(x))^c modulo x^s, for g without constant term, c possibly huge."""
    out = [Fraction(0)] * s
    out[0] = Fraction(1)
    gj = [Fraction(1)] + [Fraction(0)] * (s - 1)
    for j in range(1, s):
        gj = _trunc_mul(gj, g, s)
        if not any(gj):
            break
        binom = math.comb(c, j)
        out = [o + binom * x for o, x in zip(out, gj)]
    return out


def finite_sing_density(profile: NuProfile, s: int) -> TruncatedDensity:
    """Density of sections quasismooth away from fewer than s points."""
    if s < 1:
        raise ValidationError("s must be at least 1")
    if profile.has_zero:
        raise ZeroNu("a point with nu = 0 makes the finite-singularity formula meaningless")
    q = profile.q
    poly = [Fraction(1)] + [Fraction(0)] * (s - 1)
    for e, v, c in profile.items():
        g = [Fraction(0), Fraction(1, q**v - 1)] + [Fraction(0)] * (s - 2)
        poly = _trunc_mul(poly, _trunc_power(g[:s], c, s), s)
    coeff_sum = sum(poly)
    main = main_density(profile)
    value = main.value * coeff_sum
    return TruncatedDensity(
        value,
        profile.depth,
        main.tail_bound * coeff_sum,
        f"finite(s={s})",
        True,
        main.exact,
        main.rounding_error * coeff_sum,
        {"main": main, "coefficients": poly},
    )


def subset_limit_identity(profile: NuProfile, r: int | None = None, max_points: int = 14):
    """Both sides of sum_S prod_{P in S} 1/(q^nu_P - 1) = prod_P 1/(1 - q^-nu_P).

    The left side is summed over every subset of the degree <= r points, so
    at most ``max_points`` points are allowed.
    """
    r = profile.depth if r is None else r
    q = profile.q
    nus = []
    for e, v, c in profile.items():
        if e <= r:
            nus.extend([v] * c)
    if any(v == 0 for v in nus):
        raise ZeroNu("the identity needs nu > 0 everywhere")
    if len(nus) > max_points:
        raise CapExceeded(f"{len(nus)} points exceed the subset enumeration cap of {max_points}")
    u = [Fraction(1, q**v - 1) for v in nus]
    lhs = Fraction(0)
    for mask in range(1 << len(u)):
        term = Fraction(1)
        for i, x in enumerate(u):
            if mask >> i & 1:
                term *= x
        lhs += term
    rhs = Fraction(1)
    for v in nus:
        rhs /= 1 - Fraction(1, q**v)
    return lhs, rhs


class ClosedFormMu:
    """mu_P(a) for P in a smooth surface, as a function of Q = q^deg P.

    mu(0) = 1 - Q^-3 and mu(1) = Q^-3 - Q^-4, lengths counted over the residue
    field of P.
    """

    method = "closed-form"

    def __init__(self, q: int):
        self.q = q
        self.a_max = 1

    def __call__(self, a: int, degree: int) -> Fraction:
        Q = Fraction(self.q**degree)
        if a == 0:
            return 1 - Q**-3
        if a == 1:
            return Q**-3 - Q**-4
        raise ValidationError("the closed form covers lengths 0 and 1 only")


def scheme_length_density(mu, X: ToricVariety, s: int, r: int) -> TruncatedDensity:
    """Density of sections whose singular scheme has total length < s.

    ``mu(a, degree)`` gives mu_P(a) for a closed point of that degree; lengths
    are counted over the residue field of each point.
    """
    if not X.is_smooth:
        raise NotSmooth("the singular-scheme formula needs a smooth variety")
    if s < 1:
        raise ValidationError("s must be at least 1")
    base = zeta_inverse(X, X.dim + 1, r)
    q = X.q
    a = _variety_counts(X, r)
    poly = [Fraction(1)] + [Fraction(0)] * (s - 1)
    for e, c in enumerate(a, start=1):
        if not c:
            continue
        m0 = mu(0, e)
        g = [Fraction(0)] + [Fraction(mu(j, e)) / m0 for j in range(1, s)]
        poly = _trunc_mul(poly, _trunc_power(g, c, s), s)
    coeff_sum = sum(poly)
    return TruncatedDensity(
        base.value * coeff_sum,
        r,
        base.tail_bound * coeff_sum,
        f"scheme(s={s})",
        True,
        base.exact,
        base.rounding_error * coeff_sum,
        {"zeta_inverse": base, "coefficients": poly},
    )


@dataclass(frozen=True)
class TaylorCondition:
    """Admissible jets at one point: an explicit set, a predicate, or ``"nonzero-value"``."""

    degree: int
    nu: int
    admissible: object

    def size(self, q: int) -> int:
        T = self.admissible
        if T == "nonzero-value":
            return q**self.nu - q ** (self.nu - self.degree)
        if callable(T):
            if q**self.nu > 1 << 22:
                raise CapExceeded("jet space too large to enumerate a predicate over")
            return sum(1 for v in iproduct(range(q), repeat=self.nu) if T(v))
        return len({tuple(v) for v in T})


def taylor_factor(conditions, rest: NuProfile) -> TruncatedDensity:
    """(prod_P #T_P / q^nu_P) times the main density over the remaining points."""
    q = rest.q
    f = Fraction(1)
    for cond in conditions:
        f *= Fraction(cond.size(q), q**cond.nu)
    main = main_density(rest)
    return TruncatedDensity(
        f * main.value, rest.depth, f * main.tail_bound, "taylor", True, main.exact, f * main.rounding_error
    )


# closed forms used for cross-checks


def product_space_density(m: int, n: int, q: int) -> Fraction:
    """1/zeta(m+n+1) for P^m x P^n: prod_{i<=m, j<=n} (1 - q^(i+j-m-n-1))."""
    out = Fraction(1)
    for i in range(m + 1):
        for j in range(n + 1):
            out *= 1 - Fraction(q) ** (i + j - m - n - 1)
    return out


def weighted_space_density(n: int, q: int, ell: int, w: int) -> Fraction:
    """Density for D = O(ell), 0 <= ell < w, on P(1, ..., 1, w) of dimension n."""
    Q = Fraction(q)
    if ell >= 2:
        return Fraction(0)
    out = Fraction(1)
    if ell == 1:
        for i in range(1, n):
            out *= 1 - Q**-i
        return out * (1 - Q**-n) ** 2
    out = (1 - Q**-1) ** 2
    for i in range(2, n + 1):
        out *= 1 - Q**-i
    return out


def profile_from_counts(X: ToricVariety, r: int) -> NuProfile:
    """Profile of a smooth variety: every closed point has nu = deg (dim + 1)."""
    if not X.is_smooth:
        raise NotSmooth("use nu_profile for varieties with singular points")
    a = _variety_counts(X, r)
    classes = {(e, e * (X.dim + 1)): c for e, c in enumerate(a, start=1) if c}
    return NuProfile(X.q, r, X.dim, classes)

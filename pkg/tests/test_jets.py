from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qsdensity.errors import NotSmooth
from qsdensity.ff import make_field
from qsdensity.jets import (
    JetRing,
    Unstable,
    jet_length,
    monomials_below,
    mu_exhaustive,
    mu_monte_carlo,
    singular_length,
)
from qsdensity.points import closed_points, point_from_coords
from qsdensity.toric import P, WP

F5 = make_field(5)


def jet(*terms):
    return {m: c % 5 for m, c in terms}


def test_monomial_order():
    assert monomials_below(2, 3) == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    assert JetRing(F5, 2, 3).dimension == 6


# Tjurina-type lengths of plane curve germs over F_5 (ADE normal forms).
@pytest.mark.parametrize(
    "f,length",
    [
        (jet(((1, 0), 1)), 0),  # smooth germ
        (jet(((1, 1), 1)), 1),  # node A1
        (jet(((2, 0), 1), ((0, 3), 1)), 2),  # cusp A2
        (jet(((2, 0), 1), ((0, 4), 1)), 3),  # A3
        (jet(((3, 0), 1), ((0, 3), 1)), 4),  # D4
    ],
)
def test_jet_lengths(f, length):
    assert jet_length(f, F5, 2, 7) == length


def test_unstable_when_truncated_too_early():
    res = jet_length(jet(((2, 0), 1), ((0, 4), 1)), F5, 2, 3)
    assert isinstance(res, Unstable) and not res


def _substitute(R, f, images):
    """f(images[0], images[1]) in the jet ring."""
    out = {}
    for m, c in f.items():
        term = {(0, 0): c}
        for i, k in enumerate(m):
            for _ in range(k):
                term = R.mul(term, images[i])
        out = R.add(out, term)
    return out


@given(
    st.lists(st.integers(0, 4), min_size=7, max_size=7),
    st.sampled_from([(1, 0, 0, 1), (1, 1, 0, 1), (2, 0, 3, 1), (0, 1, 1, 0)]),
)
def test_length_invariant_under_linear_change(coeffs, M):
    R = JetRing(F5, 2, 7)
    mons = [m for m in monomials_below(2, 5) if sum(m) >= 2][:7]
    f = {m: c for m, c in zip(mons, coeffs) if c}
    a, b, c, d = M
    x = {k: v for k, v in {(1, 0): a, (0, 1): b}.items() if v}
    y = {k: v for k, v in {(1, 0): c, (0, 1): d}.items() if v}
    g = _substitute(R, f, [x, y])
    la, lb = jet_length(f, F5, 2, 7), jet_length(g, F5, 2, 7)
    if not isinstance(la, Unstable) and not isinstance(lb, Unstable):
        assert la == lb


@given(st.dictionaries(st.sampled_from(monomials_below(2, 4)), st.integers(1, 4), max_size=5),
       st.dictionaries(st.sampled_from(monomials_below(2, 4)), st.integers(1, 4), max_size=5))
def test_jet_ring_leibniz(f, g):
    R = JetRing(F5, 2, 4)
    for i in range(2):
        lhs = R.truncate(R.partial(R.mul(f, g), i), 3)
        rhs = R.truncate(R.add(R.mul(R.partial(f, i), g), R.mul(f, R.partial(g, i))), 3)
        assert lhs == rhs


def test_singular_length_of_plane_curves():
    X = P(2, 5)
    origin = point_from_coords(X, (0, 0, 1))
    cusp = X.section_from_terms(3, {(2, 0, 1): 1, (0, 3, 0): 1})
    node = X.section_from_terms(3, {(1, 1, 1): 1, (3, 0, 0): 1, (0, 3, 0): 1})
    line = X.section_from_terms(1, {(1, 0, 0): 1})
    assert singular_length(cusp, origin) == 2
    assert singular_length(node, origin) == 1
    assert singular_length(line, origin) == 0
    # the same cusp moved to (1:0:0) by permuting coordinates
    moved = X.section_from_terms(3, {(1, 0, 2): 1, (0, 3, 0): 1})
    assert singular_length(moved, point_from_coords(X, (1, 0, 0))) == 2


def test_singular_length_needs_smooth_chart():
    X = WP((1, 1, 2), 3)
    f = X.section(2, [1] * len(X.monomial_basis(2)))
    sing = [p for p in closed_points(X, 1) if p.singular][0]
    with pytest.raises(NotSmooth):
        singular_length(f, sing)


def test_mu_exhaustive_plane_f2():
    T = mu_exhaustive(1, P(2, 2), a_max=1)
    assert T.mu == {0: Fraction(7, 8), 1: Fraction(1, 16)}
    assert T.overflow == Fraction(1, 16)
    assert sum(T.mu.values()) + T.overflow == 1


def test_mu_monte_carlo_deterministic_and_calibrated():
    X = P(2, 2)
    A = mu_monte_carlo(1, X, a_max=1, samples=1500, seed=7)
    B = mu_monte_carlo(1, X, a_max=1, samples=1500, seed=7)
    assert A.mu == B.mu and A.ci == B.ci
    exact = {0: 7 / 8, 1: 1 / 16}
    for a, (lo, hi) in A.ci.items():
        assert lo <= exact[a] <= hi
    assert A.method == "monte-carlo(1500)"

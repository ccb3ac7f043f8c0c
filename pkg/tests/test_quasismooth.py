import warnings

import pytest
from hypothesis import given, strategies as st

from qsdensity.errors import NotOnY
from qsdensity.points import closed_points
from qsdensity.quasismooth import (
    AmbientSubscheme,
    NuProfile,
    NuZeroWarning,
    beta_diagnostic,
    is_quasismooth_at,
    jet_vector,
    nu,
    nu_certified,
    nu_profile,
)
from qsdensity.toric import P, PxP, WP


def _sing(X):
    return {pt.coords: pt for pt in closed_points(X, 1) if pt.singular}


# Values from counting which monomials x_i * z^j (and z^j) fit the degree D + kE.
@pytest.mark.parametrize(
    "weights,D,coords,expected",
    [
        ((1, 1, 2), 4, (0, 0, 1), 1),
        ((1, 1, 2), 1, (0, 0, 1), 2),
        ((1, 2, 3), 1, (0, 0, 1), 1),
        ((1, 2, 3), 1, (0, 1, 0), 2),
        ((1, 3, 4), 2, (0, 0, 1), 0),
        ((1, 3, 4), 2, (0, 1, 0), 0),
        ((2, 3, 5), 1, (1, 0, 0), 2),
    ],
)
def test_nu_at_singular_points(weights, D, coords, expected):
    q = 3 if weights == (1, 1, 2) else 2
    X = WP(weights, q)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NuZeroWarning)
        assert nu(_sing(X)[coords], D, X=X) == expected


def test_nu_zero_warns():
    X = WP((1, 3, 4), 2)
    with pytest.warns(NuZeroWarning):
        nu_certified(_sing(X)[(0, 0, 1)], 2, X=X)


@pytest.mark.parametrize("X", [P(2, 2), PxP(1, 1, 2), P(1, 3)])
def test_smooth_points_agree_with_slow_path(X):
    for pt in closed_points(X, 2):
        fast = nu_certified(pt, 1 if X.class_group.free_rank == 1 else (1, 1), X=X)
        slow = nu_certified(pt, 1 if X.class_group.free_rank == 1 else (1, 1), X=X, force_slow=True)
        assert fast.certificate == "smooth"
        assert fast.value == slow.value == pt.degree * (X.dim + 1)
        # the rank bound deg P * (d - c) is only attained when Cl has rank 1
        assert slow.certificate == ("exact" if X.class_group.free_rank == 1 else "heuristic")


@given(st.integers(0, 5))
def test_nu_divisible_by_degree_and_bounded(D):
    X = WP((1, 1, 3), 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NuZeroWarning)
        for pt in closed_points(X, 2):
            v = nu(pt, D, X=X, force_slow=True)
            assert v % pt.degree == 0
            assert 0 <= v <= pt.degree * X.d


def test_jet_vector_and_quasismooth():
    X = P(2, 3)
    f = X.section_from_terms(2, {(2, 0, 0): 1, (0, 1, 1): 1})  # x^2 + yz
    assert is_quasismooth_at(f, (0, 1, 0))
    g = X.section_from_terms(2, {(2, 0, 0): 1})  # x^2, singular along x = 0
    assert not is_quasismooth_at(g, (0, 1, 2))
    assert [v.value for v in jet_vector(f, (1, 1, 2))] == [0, 2, 2, 1]


def test_ambient_subscheme_reduction():
    X = P(3, 2)
    hyper = X.section_from_terms(1, {(0, 0, 0, 1): 1})  # w = 0, a copy of P^2
    Y = AmbientSubscheme([hyper])
    assert Y.dim == 2
    pt = [p for p in closed_points(X, 1) if Y.contains(p.coords, p.field)][0]
    res = nu_certified(pt, 1, X=X, Y=Y, force_slow=True)
    assert res.value == 3
    off = [p for p in closed_points(X, 1) if not Y.contains(p.coords, p.field)][0]
    with pytest.raises(NotOnY):
        nu_certified(off, 1, X=X, Y=Y, force_slow=True)
    # only the points of Y enter the profile
    prof = nu_profile(X, Y, 1, max_degree=1)
    assert prof.classes == {(1, 3): 7}


def test_profile_counts_match_point_counts():
    X = WP((1, 1, 2), 3)
    prof = nu_profile(X, None, 4, max_degree=2)
    assert prof.count(1) == 13
    assert prof.classes[(1, 1)] == 1 and prof.classes[(1, 3)] == 12
    assert prof.singular == {(1, 1): 1}
    assert prof.truncate(1).depth == 1


def test_beta_diagnostic_on_smooth_locus():
    X = P(2, 2)
    prof = nu_profile(X, None, 1, max_degree=4)
    beta = beta_diagnostic(prof)
    # every point has nu = 3 e; the locus is all of P^2 (dimension 2 < 3)
    assert set(beta) == {3}
    assert beta[3].holds and 1.5 < beta[3].estimate < 2.5


def test_beta_flags_large_locus():
    prof = NuProfile.from_pairs(2, 2, [(1, 1)] * 7 + [(2, 2)] * 14)
    assert not beta_diagnostic(prof)[1].holds

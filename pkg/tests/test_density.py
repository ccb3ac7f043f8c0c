from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qsdensity.density import (
    ClosedFormMu,
    TaylorCondition,
    finite_sing_density,
    main_density,
    product_space_density,
    profile_from_counts,
    scheme_length_density,
    subset_limit_identity,
    taylor_factor,
    weighted_space_density,
    zeta_inverse,
)
from qsdensity.errors import CapExceeded, DivergentRegion, NotSmooth, ValidationError, ZeroNu
from qsdensity.quasismooth import NuProfile
from qsdensity.toric import P, PxP, WP


def test_zeta_inverse_plane_limit():
    # (1 - 1/2)(1 - 1/4)(1 - 1/8)
    assert product_space_density(2, 0, 2) == Fraction(21, 64)
    res = zeta_inverse(P(2, 2), 3, 14)
    assert abs(float(res.value) - 21 / 64) < 1e-4
    lo, hi = res.interval()
    assert lo <= 21 / 64 <= hi


def test_zeta_inverse_small_truncation_is_exact_rational():
    # degree-1 points only: (1 - 2^-3)^7
    res = zeta_inverse(P(2, 2), 3, 1)
    assert res.exact and res.value == Fraction(7, 8) ** 7


def test_zeta_divergent_region():
    with pytest.raises(DivergentRegion):
        zeta_inverse(P(2, 2), 2, 3)


def test_main_density_of_smooth_profile_is_zeta_inverse():
    X = PxP(1, 1, 3)
    assert main_density(profile_from_counts(X, 3)).value == zeta_inverse(X, 3, 3).value


def test_weighted_closed_form_matches_profile():
    from qsdensity.quasismooth import nu_profile

    X = WP((1, 1, 2), 5)
    for ell in (0, 1):
        prof = nu_profile(X, None, ell, max_degree=3)
        got = float(main_density(prof).value)
        want = float(weighted_space_density(2, 5, ell, 2))
        assert abs(got - want) < 1e-3


@given(st.integers(1, 4))
def test_finite_sing_is_monotone_in_s(s):
    prof = profile_from_counts(P(2, 2), 3)
    a = finite_sing_density(prof, s).value
    b = finite_sing_density(prof, s + 1).value
    assert a <= b <= 1


def test_finite_sing_with_s_one_is_main():
    prof = profile_from_counts(P(2, 3), 2)
    assert finite_sing_density(prof, 1).value == main_density(prof).value


def test_finite_sing_second_coefficient():
    # s = 2 adds sum_P 1/(q^nu_P - 1)
    prof = NuProfile.from_pairs(2, 2, [(1, 3)] * 7)
    res = finite_sing_density(prof, 2)
    assert res.details["coefficients"] == [1, Fraction(7, 7)]


def test_zero_nu_errors():
    prof = NuProfile.from_pairs(2, 2, [(1, 0), (1, 3)])
    assert main_density(prof).value == 0
    with pytest.raises(ZeroNu):
        finite_sing_density(prof, 2)
    with pytest.raises(ZeroNu):
        subset_limit_identity(prof)


def test_subset_identity_exact():
    prof = profile_from_counts(P(2, 2), 1)
    lhs, rhs = subset_limit_identity(prof)
    assert lhs == rhs
    with pytest.raises(CapExceeded):
        subset_limit_identity(profile_from_counts(P(2, 2), 2), max_points=13)


def test_scheme_density():
    X = P(2, 2)
    mu = ClosedFormMu(2)
    assert mu(0, 1) == Fraction(7, 8) and mu(1, 1) == Fraction(1, 16)
    s1 = scheme_length_density(mu, X, 1, 6)
    assert s1.value == zeta_inverse(X, 3, 6).value
    assert scheme_length_density(mu, X, 2, 6).value > s1.value
    with pytest.raises(NotSmooth):
        scheme_length_density(mu, WP((1, 1, 2), 3), 1, 2)
    with pytest.raises(ValidationError):
        mu(2, 1)


def test_taylor_condition_sizes():
    assert TaylorCondition(1, 3, "nonzero-value").size(2) == 4
    assert TaylorCondition(2, 6, "nonzero-value").size(2) == 48
    assert TaylorCondition(1, 2, lambda v: v[0] == 0).size(3) == 3
    assert TaylorCondition(1, 2, [(0, 0), (1, 1), (0, 0)]).size(3) == 2


def test_taylor_factor_without_conditions_is_main():
    prof = profile_from_counts(P(1, 3), 2)
    assert taylor_factor([], prof).value == main_density(prof).value

import pytest
from hypothesis import given, strategies as st

from qsdensity.acceptance import brute_force_point_count
from qsdensity.errors import NonIntegralCount
from qsdensity.ff import embed_value, make_field
from qsdensity.points import (
    closed_point_counts,
    closed_points,
    count_points,
    enumerate_closed_points,
    mobius,
    point_counts,
    point_from_coords,
    singular_locus_counts,
)
from qsdensity.toric import P, PxP, WP


def test_mobius_values():
    assert [mobius(n) for n in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]


def test_projective_line_counts():
    pc = point_counts(P(1, 2), 3)
    assert pc.N == (3, 5, 9)
    assert pc.a == (3, 1, 2)


def test_projective_plane_counts():
    X = P(2, 3)
    assert [count_points(X, r) for r in (1, 2)] == [13, 91]


def test_inconsistent_counts_raise():
    with pytest.raises(NonIntegralCount):
        closed_point_counts([3, 4])


@pytest.mark.parametrize(
    "X,r",
    [(P(2, 2), 1), (P(2, 2), 2), (WP((1, 1, 2), 3), 1), (WP((1, 1, 2), 2), 2), (PxP(1, 1, 2), 2), (WP((1, 2, 3), 2), 1)],
)
def test_formula_matches_brute_force(X, r):
    assert count_points(X, r) == brute_force_point_count(X, r)


@pytest.mark.parametrize("X", [P(2, 2), WP((1, 1, 2), 3), WP((1, 2, 3), 2), PxP(1, 1, 2)])
def test_enumeration_matches_moebius(X):
    R = 3 if X.q == 2 else 2
    a = point_counts(X, R).a
    pts = closed_points(X, R)
    for e in range(1, R + 1):
        assert sum(1 for P_ in pts if P_.degree == e) == a[e - 1]


def test_singular_locus_of_weighted_plane():
    X = WP((1, 1, 2), 3)
    sl = singular_locus_counts(X, 2)
    assert sl.a == (1, 0)
    (pt,) = [P_ for P_ in closed_points(X, 1) if P_.singular]
    assert pt.coords == (0, 0, 1)


def test_representatives_are_canonical_and_distinct():
    X = P(2, 2)
    pts = closed_points(X, 3)
    seen = set()
    for pt in pts:
        orbit = frozenset(pt.conjugates(X.field.n))
        assert orbit not in seen
        seen.add(orbit)
        assert len(orbit) == pt.degree


@given(st.integers(1, 8), st.integers(0, 12))
def test_lift_rescaling_invariance(lam, idx):
    # (x:y:z) and (l x : l y : l^2 z) are the same point of P(1,1,2)
    X = WP((1, 1, 2), 3)
    K = make_field(3, 2)
    pts = closed_points(X, 1)
    pt = pts[idx % len(pts)]
    if lam % K.order == 0:
        return
    vals = [embed_value(X.field, K, c) for c in pt.coords]
    scaled = [K.mul(vals[0], lam), K.mul(vals[1], lam), K.mul(vals[2], K.mul(lam, lam))]
    q = point_from_coords(X, [K.wrap(v) for v in scaled])
    assert q == pt


def test_frobenius_equivariance():
    X = PxP(1, 1, 2)
    for pt in closed_points(X, 2):
        for conj in pt.conjugates(X.field.n):
            assert point_from_coords(X, [pt.field.wrap(c) for c in conj]) == pt


def test_point_from_coords_rejects_irrelevant():
    with pytest.raises(ValueError):
        point_from_coords(P(2, 3), (0, 0, 0))


def test_enumeration_order_is_by_degree():
    degs = [pt.degree for pt in enumerate_closed_points(P(1, 3), 3)]
    assert degs == sorted(degs)

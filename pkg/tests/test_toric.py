import json

import pytest
from hypothesis import given, strategies as st

from qsdensity import lattice
from qsdensity.errors import InvalidFan, TorusFactor, ValidationError
from qsdensity.toric import (
    P,
    PxP,
    WP,
    Fan,
    class_group,
    load_variety,
    partial_derivative,
    variety_spec,
)

small = st.integers(-6, 6)


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=2, max_size=4))
def test_smith_normal_form_factorises(A):
    D, U, V = lattice.smith_normal_form(A)
    assert lattice.matmul(lattice.matmul(U, A), V) == D
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    nz = [x for x in diag if x]
    assert all(x > 0 for x in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert abs(lattice.det(U)) == 1 and abs(lattice.det(V)) == 1


def test_snf_frozen():
    assert lattice.invariant_factors([[2, 4], [6, 8]]) == [2, 4]
    assert lattice.invariant_factors([[2, 0], [0, 3]]) == [1, 6]


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=2))
def test_kernel_is_saturated_kernel(A):
    K = lattice.integer_kernel(A, 3)
    for v in K:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in A)
    assert len(K) == 3 - lattice.rank(A)


@pytest.mark.parametrize(
    "weights,basis_sizes",
    [((1, 1, 1), [1, 3, 6, 10, 15]), ((1, 2, 3), [1, 1, 2, 3, 4, 5, 7, 8]), ((1, 1, 2), [1, 2, 4, 6, 9])],
)
def test_weighted_basis_sizes(weights, basis_sizes):
    # coefficients of prod 1/(1 - t^w)
    X = WP(weights, 2)
    assert [len(X.monomial_basis(k)) for k in range(len(basis_sizes))] == basis_sizes


def test_weighted_fans_and_class_groups():
    X = WP((1, 2, 3), 2)
    assert X.class_group.free_rank == 1 and X.class_group.torsion_invariants == ()
    assert [g.free for g in X.grading] == [(1,), (2,), (3,)]
    assert not X.is_smooth
    assert P(2, 2).is_smooth and P(2, 2).fan.rays == WP((1, 1, 1), 2).fan.rays
    assert WP((1, 1, 3), 2).fan.rays == ((1, 0), (-1, -3), (0, 1))


def test_product_class_group():
    X = PxP(1, 2, 3)
    assert X.class_group.free_rank == 2
    assert X.twist.free == (1, 1)
    # bidegree (a, b) has (a+1) * C(b+2, 2) monomials
    assert len(X.monomial_basis((2, 1))) == 3 * 3
    assert len(X.monomial_basis((1, 2))) == 2 * 6


def test_basis_order_is_grlex():
    B = P(2, 2).monomial_basis(2)
    assert B == tuple(sorted(B, reverse=True))
    assert B[0] == (2, 0, 0) and B[-1] == (0, 0, 2)


@given(st.integers(0, 6), st.integers(0, 6))
def test_basis_is_multiplicative(c1, c2):
    X = WP((1, 2, 3), 3)
    target = set(X.monomial_basis(c1 + c2))
    for a in X.monomial_basis(c1):
        for b in X.monomial_basis(c2):
            assert tuple(x + y for x, y in zip(a, b)) in target


def test_fan_validation():
    with pytest.raises(TorusFactor):
        Fan([(1, 0), (-1, 0)], [(0,), (1,)])
    with pytest.raises(InvalidFan):
        # overlapping cones
        Fan([(1, 0), (0, 1), (1, 1)], [(0, 1), (0, 2)])


def test_section_leibniz_and_evaluation():
    X = P(2, 5)
    f = X.section(1, [1, 2, 3])
    g = X.section(2, list(range(6)))
    fg = f * g
    for i in range(3):
        lhs = partial_derivative(fg, i)
        rhs = partial_derivative(f, i) * g + f * partial_derivative(g, i)
        assert lhs.terms() == rhs.terms()
    assert f((1, 1, 1)).value == 6 % 5
    # Euler relation: sum x_i df/dx_i = deg * f
    pt = (2, 3, 4)
    K = X.field
    euler = sum(K.mul(pt[i], g.partial(i)(pt).value) for i in range(3)) % 5
    assert euler == (2 * g(pt).value) % 5


def test_divisor_parsing():
    X = PxP(1, 1, 2)
    assert X.divisor("O(2,3)").free == (2, 3)
    assert X.divisor((2, 3)) == X.divisor("O(2,3)")
    assert X.divisor(0) == X.class_group.zero()
    with pytest.raises(ValidationError):
        X.divisor(3)


def test_load_variety_roundtrip(tmp_path):
    spec = {"mode": "weighted", "weights": [1, 1, 2], "field": {"p": 3, "a": 1}}
    path = tmp_path / "v.json"
    path.write_text(json.dumps(spec))
    X = load_variety(str(path))
    assert X.q == 3 and X.d == 3
    Y = load_variety(variety_spec(X))
    assert Y.fan.rays == X.fan.rays
    assert load_variety(spec, field_override=(2, 2)).q == 4
    with pytest.raises(ValidationError):
        load_variety({"mode": "weighted", "weights": [1, 1], "rays": [], "field": {"p": 3, "a": 1}})
    with pytest.raises(ValidationError):
        load_variety({"mode": "fan", "rays": [[1, 0]], "max_cones": [[0]], "field": {"p": 2, "a": 1}})

import itertools

import pytest
from hypothesis import given, strategies as st

from qsdensity.errors import NotPrime, NotASubfield
from qsdensity.ff import (
    embed,
    embed_value,
    embedding_images,
    frobenius,
    is_irreducible,
    make_field,
    minimal_degree,
    norm,
    trace,
)

FIELDS = [(2, 1), (2, 3), (2, 4), (3, 1), (3, 2), (5, 2), (7, 1)]


def elements(p, n):
    return st.integers(0, p**n - 1)


@pytest.mark.parametrize("p,n", FIELDS)
def test_modulus_is_irreducible_and_lex_smallest(p, n):
    F = make_field(p, n)
    assert is_irreducible(list(F.modulus), p)
    # every monic polynomial that sorts earlier must be reducible
    if n > 1:
        for low in itertools.product(range(p), repeat=n):
            cand = list(low) + [1]
            if tuple(cand) >= tuple(F.modulus):
                continue
            assert not is_irreducible(cand, p)


def test_known_moduli():
    assert make_field(2, 2).modulus == (1, 1, 1)
    assert make_field(3, 2).modulus == (1, 0, 1)
    assert make_field(2, 3).modulus == (1, 0, 1, 1)
    assert make_field(2, 3).order == 8


@pytest.mark.parametrize("p,n", FIELDS)
@given(data=st.data())
def test_field_axioms(p, n, data):
    F = make_field(p, n)
    a, b, c = (data.draw(elements(p, n)) for _ in range(3))
    assert F.add(a, b) == F.add(b, a)
    assert F.mul(a, b) == F.mul(b, a)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.add(a, F.neg(a)) == 0
    if a:
        assert F.mul(a, F.inv(a)) == 1
        assert F.pow(a, F.order - 1) == 1


@pytest.mark.parametrize("p,n", FIELDS)
def test_frobenius_is_additive_and_has_order_n(p, n):
    F = make_field(p, n)
    for a in range(F.order):
        assert F.frobenius(a, n) == a
        for b in (1, F.order - 1):
            assert F.frobenius(F.add(a, b)) == F.add(F.frobenius(a), F.frobenius(b))


def test_element_wrapper_arithmetic():
    F = make_field(3, 2)
    x = F.wrap(5)
    assert F(5) == F(2)  # integers map through the prime field
    assert (x * x.inverse()).value == 1
    assert (x - x).value == 0
    assert x**8 == F(1)
    assert not F(0)


def test_norm_trace_land_in_base():
    K = make_field(2, 4)
    for v in range(K.order):
        x = K.wrap(v)
        assert minimal_degree(norm(x, 2), 2) == 1
        assert minimal_degree(trace(x, 1), 1) == 1
        assert frobenius(x, 4) == x


def test_minimal_degree_counts():
    # F_16 over F_2: 2 elements of degree 1, 2 of degree 2, 12 of degree 4
    K = make_field(2, 4)
    degs = [minimal_degree(K.wrap(v)) for v in range(16)]
    assert degs.count(1) == 2 and degs.count(2) == 2 and degs.count(4) == 12


@pytest.mark.parametrize("p,m,n", [(2, 2, 4), (2, 3, 6), (3, 1, 2), (3, 2, 4), (2, 2, 6)])
def test_embedding_is_a_ring_homomorphism(p, m, n):
    F, K = make_field(p, m), make_field(p, n)
    for a in range(F.order):
        for b in range(0, F.order, max(1, F.order // 5)):
            assert embed_value(F, K, F.mul(a, b)) == K.mul(embed_value(F, K, a), embed_value(F, K, b))
            assert embed_value(F, K, F.add(a, b)) == K.add(embed_value(F, K, a), embed_value(F, K, b))
    assert len(set(embedding_images(F, K))) == m


def test_embeddings_are_coherent():
    F2, F4, F8 = make_field(2, 2), make_field(2, 4), make_field(2, 8)
    for a in range(F2.order):
        via = embed_value(F4, F8, embed_value(F2, F4, a))
        assert via == embed_value(F2, F8, a)
    assert embed(F2(3), F4).field is F4


def test_field_errors():
    with pytest.raises(NotPrime):
        make_field(4, 1)
    with pytest.raises(NotASubfield):
        embed_value(make_field(2, 2), make_field(2, 3), 1)

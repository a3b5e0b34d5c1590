from __future__ import annotations

import itertools
import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcss.galois import DEFAULT_PRIMITIVE_POLYNOMIALS, DivisionByZero, Field, NonPrimitivePolynomial


def clmul_mod(a: int, b: int, poly: int, m: int) -> int:
    """Schoolbook carry-less product reduced modulo poly (no tables)."""
    prod = 0
    for k in range(m):
        if (b >> k) & 1:
            prod ^= a << k
    for k in range(2 * m - 2, m - 1, -1):
        if (prod >> k) & 1:
            prod ^= poly << (k - m)
    return prod


def multiplicative_order(poly: int, m: int) -> int:
    x, r = 2, 1
    while x != 1:
        x = clmul_mod(x, 2, poly, m)
        r += 1
        if r > (1 << m):
            return 0
    return r


@pytest.mark.parametrize("m", [2, 3, 4])
def test_field_axioms_exhaustive(m):
    F = Field(m)
    els = range(F.size)
    for a, b in itertools.product(els, els):
        assert F.mul(a, b) == clmul_mod(a, b, F.prim_poly, m)
        assert F.mul(a, b) == F.mul(b, a)
        assert F.add(a, b) == a ^ b
    for a, b, c in itertools.product(els, els, els):
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, b ^ c) == F.mul(a, b) ^ F.mul(a, c)
    for a in range(1, F.size):
        assert F.mul(a, F.inv(a)) == 1
        assert F.div(a, a) == 1


@pytest.mark.parametrize("m", range(2, 17))
def test_exp_log_tables_are_inverse_bijections(m):
    F = Field(m)
    exp = F.exp_table[: F.order]
    assert sorted(exp.tolist()) == list(range(1, F.size))
    assert np.array_equal(F.log_table[exp], np.arange(F.order))
    assert F.log_table[0] == -1
    assert np.array_equal(F.exp_table[F.order:], exp)


@pytest.mark.parametrize("m", range(2, 11))
def test_default_polynomial_is_smallest_primitive(m):
    N = (1 << m) - 1
    primitive = [p for p in range((1 << m) | 1, 1 << (m + 1), 2) if multiplicative_order(p, m) == N]
    assert DEFAULT_PRIMITIVE_POLYNOMIALS[m] == primitive[0]


@pytest.mark.parametrize("poly", [0x15, 0x1F, 0x11])
def test_non_primitive_polynomials_rejected(poly):
    # x^4+x^2+1 is reducible, x^4+x^3+x^2+x+1 is irreducible of order 5, x^4+1 = (x+1)^4
    with pytest.raises(NonPrimitivePolynomial):
        Field(4, poly)


def test_wrong_degree_rejected():
    with pytest.raises(NonPrimitivePolynomial):
        Field(4, 0xB)
    with pytest.raises(ValueError):
        Field(1)
    with pytest.raises(ValueError):
        Field(17)


def test_zero_handling():
    F = Field(5)
    assert F.pow(0, 0) == 1
    assert F.pow(0, 3) == 0
    assert F.mul(0, 7) == 0
    with pytest.raises(DivisionByZero):
        F.inv(0)
    with pytest.raises(ZeroDivisionError):
        F.div(3, 0)
    with pytest.raises(DivisionByZero):
        F.log(0)
    with pytest.raises(ValueError):
        F.pow(3, -1)


def test_element_from_exponent_range():
    F = Field(4)
    assert F.element_from_exponent(0) == 1
    assert F.element_from_exponent(1) == 2
    assert F.element_from_exponent(4) == 0x3  # alpha^4 = alpha + 1 for x^4+x+1
    with pytest.raises(IndexError):
        F.element_from_exponent(15)
    with pytest.raises(IndexError):
        F.element_from_exponent(-1)


def test_pickle_and_equality():
    F = Field(10)
    G = pickle.loads(pickle.dumps(F))
    assert G == F and hash(G) == hash(F)
    assert Field(4) != Field(4, 0x19)
    assert np.array_equal(G.exp_table, F.exp_table)


field_and_pairs = st.integers(5, 12).flatmap(
    lambda m: st.tuples(
        st.just(m),
        st.integers(0, (1 << m) - 1),
        st.integers(0, (1 << m) - 1),
    )
)


@settings(max_examples=300, deadline=None)
@given(field_and_pairs)
def test_table_product_matches_polynomial_oracle(args):
    m, a, b = args
    F = Field(m)
    assert F.mul(a, b) == clmul_mod(a, b, F.prim_poly, m)


@settings(max_examples=200, deadline=None)
@given(field_and_pairs)
def test_frobenius(args):
    m, a, b = args
    F = Field(m)
    assert F.pow(a ^ b, 2) == F.pow(a, 2) ^ F.pow(b, 2)
    assert F.pow(a, 1 << m) == a
    if a:
        assert F.pow(a, F.order) == 1


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 12), st.lists(st.integers(0, 4095), min_size=1, max_size=50), st.data())
def test_vectorized_ops_agree(m, xs, data):
    F = Field(m)
    a = np.array([x % F.size for x in xs])
    b = np.array(data.draw(st.lists(st.integers(0, F.order), min_size=len(xs), max_size=len(xs))))
    assert F.mul_vec(a, b).tolist() == [F.mul(int(x), int(y)) for x, y in zip(a, b)]
    nz = a[a != 0]
    assert F.inv_vec(nz).tolist() == [F.inv(int(x)) for x in nz]
    with pytest.raises(DivisionByZero):
        F.inv_vec(np.array([1, 0]))


def test_small_field_values():
    F = Field(4)
    alpha = F.element_from_exponent
    assert F.pow(2, 8) == alpha(8) == 0b0101  # alpha^8 = (alpha + 1)^2 = alpha^2 + 1
    assert F.add(alpha(1), alpha(4)) == 1
    assert F.mul(alpha(3), alpha(5)) == alpha(8)
    assert F.inv(alpha(6)) == alpha(9)
    assert F.exp_table[15] == F.exp_table[0] == 1

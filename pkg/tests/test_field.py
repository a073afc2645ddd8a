import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adg.field import (
    Field,
    FieldError,
    factor_prime_power,
    field_from_order,
    is_irreducible,
    least_irreducible,
    parse_modulus,
)

from conftest import digits, poly_mulmod, undigits

SMALL_ORDERS = [2, 3, 4, 5, 7, 8, 9]


def test_examples():
    assert Field(3).add(2, 2) == 1
    assert Field(5).mul(3, 2) == 1
    gf4 = field_from_order(4)
    x = gf4.from_coeffs([0, 1])
    assert gf4.mul(x, x) == gf4.from_coeffs([1, 1])
    assert gf4.inv(x) == gf4.from_coeffs([1, 1])
    assert Field(5).inv(3) == 2
    assert list(Field(3).elements()) == [0, 1, 2]
    assert list(gf4.elements()) == [0, 1, 2, 3]


@pytest.mark.parametrize("q", SMALL_ORDERS + [16, 25, 27, 49, 64, 81, 121, 125, 4096, 8192])
def test_inv_one_and_length(q):
    F = field_from_order(q)
    assert F.inv(1) == 1
    assert len(F.elements()) == q


def test_default_moduli():
    assert least_irreducible(2, 2) == (1, 1, 1)
    assert least_irreducible(2, 3) == (1, 0, 1, 1)  # x^3 + x^2 + 1 precedes x^3 + x + 1
    assert least_irreducible(3, 2) == (1, 0, 1)
    assert is_irreducible((1, 0, 1, 1), 2)
    assert is_irreducible((2, 1, 1), 3)
    assert not is_irreducible((1, 0, 1), 2)


def test_factoring_and_errors():
    assert factor_prime_power(81) == (3, 4)
    assert factor_prime_power(7) == (7, 1)
    for bad in (1, 6, 12, 100):
        with pytest.raises(FieldError):
            field_from_order(bad)
    with pytest.raises(FieldError):
        field_from_order(2**32)
    with pytest.raises(FieldError):
        Field(2, 2, (1, 0, 1))  # x^2 + 1 = (x + 1)^2 over F_2
    with pytest.raises(FieldError):
        Field(5, 1, (1, 1))
    with pytest.raises(ZeroDivisionError):
        Field(7).inv(0)
    with pytest.raises(FieldError):
        Field(3).add(3, 0)
    with pytest.raises(FieldError):
        field_from_order(4).mul(-1, 1)
    assert parse_modulus("1, 1, 0, 1") == (1, 1, 0, 1)


@pytest.mark.parametrize("q,modulus", [(q, None) for q in SMALL_ORDERS + [16, 27, 49, 64, 81]] + [(8, (1, 1, 0, 1)), (9, (2, 1, 1))])
def test_against_polynomial_reference(q, modulus):
    F = field_from_order(q, modulus)
    mod = F.modulus or (0, 1)
    for a, b in itertools.product(range(q), repeat=2):
        da, db = digits(a, F.p, F.e), digits(b, F.p, F.e)
        assert F.add(a, b) == undigits([(x + y) % F.p for x, y in zip(da, db)], F.p)
        if F.e == 1:
            assert F.mul(a, b) == a * b % q
        else:
            assert F.mul(a, b) == undigits(poly_mulmod(da, db, mod, F.p), F.p)


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_axioms_exhaustive(q):
    F = field_from_order(q)
    E = np.arange(q)
    a, b, c = (x.ravel() for x in np.meshgrid(E, E, E, indexing="ij"))
    assert (F.vadd(F.vadd(a, b), c) == F.vadd(a, F.vadd(b, c))).all()
    assert (F.vmul(F.vmul(a, b), c) == F.vmul(a, F.vmul(b, c))).all()
    assert (F.vadd(a, b) == F.vadd(b, a)).all()
    assert (F.vmul(a, b) == F.vmul(b, a)).all()
    assert (F.vmul(a, F.vadd(b, c)) == F.vadd(F.vmul(a, b), F.vmul(a, c))).all()
    assert (F.vsub(F.vadd(a, b), b) == a).all()
    assert (F.vadd(E, F.vneg(E)) == 0).all()
    for x in range(1, q):
        assert F.mul(x, F.inv(x)) == 1
    assert (F.vpow(E, q) == E).all()


@pytest.mark.parametrize("q", SMALL_ORDERS + [27, 125])
def test_code_round_trip(q):
    F = field_from_order(q)
    for a in F.elements():
        assert F.from_coeffs(F.coeffs(a)) == a


@given(st.integers(min_value=-10**6, max_value=10**6))
def test_literals_reduce_mod_p(n):
    F = field_from_order(9)
    assert F.from_int(n) == n % 3


@pytest.mark.parametrize("q", [2**13, 3**9, 65537])
def test_large_fields_without_tables(q):
    F = field_from_order(q)
    rng = np.random.default_rng(1)
    a = rng.integers(1, q, size=200)
    b = rng.integers(1, q, size=200)
    assert (F.vmul(F.vmul(a, b), F.vadd(a, b)) == F.vadd(F.vmul(F.vmul(a, a), b), F.vmul(F.vmul(a, b), b))).all()
    for x in a[:20].tolist():
        assert F.mul(x, F.inv(x)) == 1


@pytest.mark.parametrize("q", [2187, 4096])
def test_tabulated_large_fields_against_reference(q):
    F = field_from_order(q)
    rng = np.random.default_rng(7)
    for a, b in rng.integers(0, q, size=(300, 2)).tolist():
        da, db = digits(a, F.p, F.e), digits(b, F.p, F.e)
        assert F.mul(a, b) == undigits(poly_mulmod(da, db, F.modulus, F.p), F.p)
        assert F.add(a, b) == undigits([(x + y) % F.p for x, y in zip(da, db)], F.p)

import pytest
from hypothesis import given, strategies as st

from randlcm.polynomial import IntPolynomial, one_minus_zpow

coeffs = st.lists(st.integers(-50, 50), max_size=8)
polys = coeffs.map(IntPolynomial)


def test_canonical_form():
    assert IntPolynomial([1, 2, 0, 0]).coeffs == (1, 2)
    assert IntPolynomial([0, 0]).coeffs == ()
    assert IntPolynomial().degree == -1
    assert IntPolynomial([3])[5] == 0


@given(polys, polys, polys)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == IntPolynomial()


@given(polys, polys, st.integers(-3, 3))
def test_evaluation_is_a_homomorphism(a, b, z):
    assert (a * b)(z) == a(z) * b(z)
    assert (a + b)(z) == a(z) + b(z)


@given(polys, polys, st.integers(0, 6))
def test_truncated_product(a, b, d):
    assert a.mul_trunc(b, d) == (a * b).truncate(d)


@given(polys, st.integers(1, 5))
def test_exact_division_round_trip(a, n):
    d = one_minus_zpow(n)
    assert (a * d).exact_div(d) == a


def test_division_remainder():
    q, r = IntPolynomial([1, 0, 0, 1]).divmod(IntPolynomial([1, 1]))  # z^3 + 1 = (z+1)(z^2-z+1)
    assert q == IntPolynomial([1, -1, 1]) and not r
    with pytest.raises(ArithmeticError):
        IntPolynomial([1, 0, 1]).exact_div(IntPolynomial([-1, 1]))


def test_laurent_shift():
    poly, principal = IntPolynomial([5, 0, 7, 1]).laurent_shift(-2)
    assert poly == IntPolynomial([7, 1])
    assert principal == IntPolynomial([0, 5])  # 5 z^-2
    assert IntPolynomial([1]).laurent_shift(2)[0] == IntPolynomial([0, 0, 1])


def test_power():
    assert IntPolynomial([1, 1]) ** 4 == IntPolynomial([1, 4, 6, 4, 1])
    assert IntPolynomial([1, 1]).pow_trunc(4, 2) == IntPolynomial([1, 4, 6])

from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twtrace.arith import (Discriminant, discriminant_splittings, divisors, factor, is_fundamental,
                           is_squarefree, kronecker, sqrts_mod_4N)


def legendre_oracle(D, p):
    if D % p == 0:
        return 0
    return 1 if any((x * x - D) % p == 0 for x in range(p)) else -1


@pytest.mark.parametrize("D,n,expected", [(5, 1, 1), (5, 5, 0), (5, 7, -1), (-4, -1, -1), (5, -1, 1),
                                          (5, 2, -1), (8, 3, -1), (-3, 2, -1), (1, 0, 1), (2, 0, 0)])
def test_kronecker_values(D, n, expected):
    assert kronecker(D, n) == expected


@given(st.integers(-200, 200), st.integers(-60, 60), st.integers(-60, 60))
def test_kronecker_multiplicative(D, n, m):
    assert kronecker(D, n * m) == kronecker(D, n) * kronecker(D, m)


@given(st.integers(-300, 300).filter(lambda d: d % 4 in (0, 1) and d != 0),
       st.sampled_from([3, 5, 7, 11, 13, 17, 19, 23, 29, 31]))
def test_kronecker_legendre(D, p):
    assert kronecker(D, p) == legendre_oracle(D, p)


@given(st.integers(-100, 100), st.integers(-100, 100))
def test_kronecker_zero_iff_common_factor(D, n):
    if (D, n) != (0, 0) and abs(n) != 1 and abs(D) != 1:
        assert (kronecker(D, n) == 0) == (gcd(D, n) > 1)


@pytest.mark.parametrize("D,expected", [(1, True), (5, True), (12, True), (45, False), (-4, True),
                                        (-3, True), (8, True), (-8, True), (4, False), (-20, True),
                                        (20, False), (2, False), (0, False), (-16, False)])
def test_is_fundamental(D, expected):
    assert is_fundamental(D) is expected


def brute_fundamental(D):
    if D == 1:
        return True
    if D % 4 == 1:
        return is_squarefree(abs(D))
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(abs(m))
    return False


def test_is_fundamental_against_definition():
    for D in range(-500, 501):
        if D:
            assert is_fundamental(D) == brute_fundamental(D), D


def test_discriminant_type():
    assert Discriminant(-40).is_fundamental is True
    assert Discriminant(-36).is_fundamental is False
    with pytest.raises(ValueError):
        Discriminant(7)


@pytest.mark.parametrize("D,expected", [(5, [(1, 5), (5, 1)]), (1, [(1, 1)]),
                                        (-20, [(1, -20), (-4, 5), (5, -4), (-20, 1)])])
def test_splittings(D, expected):
    assert sorted(discriminant_splittings(D)) == sorted(expected)


def test_splittings_multiply_and_are_discriminants():
    for D in range(-200, 201):
        if D and is_fundamental(D):
            for D1, D2 in discriminant_splittings(D):
                assert D1 * D2 == D
                assert D1 % 4 in (0, 1) and D2 % 4 in (0, 1)


def test_splittings_reject_non_fundamental():
    with pytest.raises(ValueError):
        discriminant_splittings(45)


@pytest.mark.parametrize("D,N,expected", [(1, 1, [1]), (2, 1, [])])
def test_sqrts_small(D, N, expected):
    assert sqrts_mod_4N(D, N) == expected


def test_sqrts_example():
    assert 7 in sqrts_mod_4N(5, 11)


@settings(max_examples=200)
@given(st.integers(-300, 300), st.integers(1, 40))
def test_sqrts_canonical(D, N):
    roots = sqrts_mod_4N(D, N)
    assert roots == sorted(roots)
    for r in roots:
        assert 0 <= r < 2 * N
        assert (r * r - D) % (4 * N) == 0
    brute = [r for r in range(2 * N) if (r * r - D) % (4 * N) == 0]
    assert roots == brute


def test_factor_and_divisors():
    assert factor(360) == {2: 3, 3: 2, 5: 1}
    assert divisors(12) == [1, 2, 3, 4, 6, 12]

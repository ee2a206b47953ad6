import json
import random
from fractions import Fraction

import pytest

from twtrace.qseries import (FormalSeries, J_qexp, ZetaPolynomial, delta_qexp, eisenstein_qexp, eta_qexp,
                             faber_Jm, faber_polynomial, j_qexp, sigma)


def rand_series(rng, order=8):
    v = rng.randint(-3, 1)
    return FormalSeries(v, [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(order - v)], order)


def test_delta_first_terms():
    d = delta_qexp(4)
    assert [d[n] for n in range(1, 4)] == [1, -24, 252]
    assert delta_qexp(1).is_zero()


def test_eta24_is_delta():
    e = eta_qexp(10, 24)
    d = delta_qexp(11)
    assert all(e[n] == d[n + 1] for n in range(10))


def test_eta_pentagonal():
    order = 60
    e = eta_qexp(order)
    pent = {}
    for k in range(-10, 11):
        g = k * (3 * k - 1) // 2
        if 0 <= g < order:
            pent[g] = (-1) ** (k % 2)
    for n in range(order):
        assert e[n] == pent.get(n, 0)


def test_eisenstein():
    e4, e6 = eisenstein_qexp(4, 5), eisenstein_qexp(6, 5)
    assert [e4[n] for n in range(3)] == [1, 240, 2160]
    assert [e6[n] for n in range(3)] == [1, -504, -16632]
    for n in range(1, 5):
        assert e4[n] == 240 * sigma(n, 3)
        assert e6[n] == -504 * sigma(n, 5)
    with pytest.raises(ValueError):
        eisenstein_qexp(8, 5)


def test_e4_cubed_minus_e6_squared():
    order = 20
    lhs = eisenstein_qexp(4, order) ** 3 - eisenstein_qexp(6, order) ** 2
    rhs = delta_qexp(order).scale(1728)
    assert lhs == rhs


def test_J_coefficients():
    J = J_qexp(3)
    assert J[-1] == 1 and J[0] == 0 and J[1] == 196884 and J[2] == 21493760
    assert j_qexp(2)[0] == 744


def test_all_coefficients_integral():
    for n in range(-1, 40):
        assert isinstance(j_qexp(40)[n], int)


def test_faber():
    assert faber_Jm(1, 6) == J_qexp(6)
    J2 = faber_Jm(2, 6)
    assert J2.principal_part() == {-2: 1}
    assert J2[0] == 0 and J2[-1] == 0
    for m in range(1, 6):
        pp = faber_Jm(m, 4).principal_part()
        assert pp == {-m: 1}


def test_faber_polynomial_j2():
    assert tuple(faber_polynomial(2)) == (159768, -1488, 1)


def test_faber_uniqueness_oracle():
    # J2 - (J^2 - 2*196884) has no principal part and no constant term, so is 0
    order = 10
    J = J_qexp(order + 2)
    diff = faber_Jm(2, order) - ((J * J).truncate(order) - 2 * 196884)
    assert diff.is_zero()


def test_ring_axioms():
    rng = random.Random(5)
    for _ in range(30):
        a, b, c = (rand_series(rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a


def test_division_roundtrip():
    rng = random.Random(7)
    for _ in range(30):
        a, b = rand_series(rng), rand_series(rng)
        if b.is_zero():
            continue
        q = a / b
        back = q * b
        n = min(back.order, a.order)
        assert back.truncate(n) == a.truncate(n)


def test_truncation_propagates_min_order():
    a = FormalSeries(0, [1, 2, 3], 3)
    b = FormalSeries(0, [1, 1, 1, 1, 1], 5)
    assert (a + b).order == 3
    with pytest.raises(IndexError):
        (a + b)[4]
    with pytest.raises(ValueError):
        a.truncate(6)


def test_json_roundtrip():
    s = J_qexp(5)
    data = json.loads(json.dumps(s.to_json()))
    assert all(isinstance(c, str) for c in data["coefficients"])
    assert FormalSeries.from_json(data) == s


def test_zeta_polynomial():
    p = ZetaPolynomial({-1: 1, 0: -2, 1: 1})
    q = ZetaPolynomial({-1: 1, 0: 10, 1: 1})
    prod = p * q
    assert prod.low == -2 and prod.high == 2
    assert prod.terms() == {-2: 1, -1: 8, 0: -18, 1: 8, 2: 1}
    assert p - p == ZetaPolynomial()
    assert p + 3 == ZetaPolynomial({-1: 1, 0: 1, 1: 1})

import json
from fractions import Fraction

import pytest

from twtrace.jacobi import (JacobiError, JacobiSeries, check_discriminant_dependence, check_symmetry, gen_a,
                            gen_b, jacobi_coeff, jacobi_mul, jacobi_one, lift_targets, modular_basis,
                            plus_space_series, solve_principal_part, twisted_lift_jacobi, zagier_g)
from twtrace.qseries import FormalSeries, ZetaPolynomial
from twtrace.traces import admissible_d, dual_trace, principal_parts, trace_positive, twisted_trace

PHI1_Q0 = {-11: 11, -1: 1, 0: -24, 1: 1, 11: 11}
PHI1_Q1 = {-6: -7256, -5: 885480, -4: -16576512, -3: 117966288, -2: -425691312, -1: 884736744,
           0: -1122626864}
PHI5_Q1 = {-7: 1, -6: -190356480, -5: 8888136755960, -4: -6223486166302720, -3: 500630878062874377,
           -2: -8824913060318164992, -1: 45310559791371053140, 0: -77176788074781143040}


@pytest.fixture(scope="module")
def paper_parts():
    return principal_parts("J(11z)", 11)


@pytest.fixture(scope="module")
def phi1(paper_parts):
    return twisted_lift_jacobi(paper_parts, 11, 1, 1, 2)


@pytest.fixture(scope="module")
def phi5(paper_parts):
    return twisted_lift_jacobi(paper_parts, 11, 5, 7, 2)


def test_generators_first_terms():
    a, b = gen_a(3), gen_b(3)
    assert a.series[0].terms() == {-1: 1, 0: -2, 1: 1}
    assert a.series[1].terms() == {-2: -2, -1: 8, 0: -12, 1: 8, 2: -2}
    assert b.series[0].terms() == {-1: 1, 0: 10, 1: 1}
    assert b.series[1].terms() == {-2: 10, -1: -64, 0: 108, 1: -64, 2: 10}
    assert (a.weight, a.index, b.weight, b.index) == (-2, 1, 0, 1)
    with pytest.raises(ValueError):
        gen_a(0)


def test_generators_at_z_zero():
    # a(tau, 0) = 0 and b(tau, 0) = 12
    for n in range(6):
        assert sum(gen_a(6).series[n].terms().values()) == 0
        assert sum(gen_b(6).series[n].terms().values()) == (12 if n == 0 else 0)


def test_generators_are_jacobi_forms():
    for g in (gen_a(8), gen_b(8)):
        assert check_discriminant_dependence(g)
        assert check_symmetry(g)


def test_generator_square():
    b2 = jacobi_mul(gen_b(6), gen_b(6))
    assert sum(b2.series[0].terms().values()) == 144
    assert (b2.weight, b2.index) == (0, 2)


def test_mul_identity_and_convolution():
    a = gen_a(5)
    one = jacobi_one(5)
    assert jacobi_mul(a, one) == a
    ab = jacobi_mul(a, gen_b(5))
    # coefficient oracle: direct double sum
    for n in range(5):
        for r in range(-4, 5):
            want = sum(a.coefficient(i, s) * gen_b(5).coefficient(n - i, r - s)
                       for i in range(n + 1) for s in range(-8, 9))
            assert ab.coefficient(n, r) == want
    with pytest.raises(IndexError):
        ab.coefficient(5, 0)


def test_incompatible_addition():
    with pytest.raises(ValueError):
        gen_a(3) + gen_b(3)


def test_modular_basis_dimensions():
    assert [k for k, _ in modular_basis(4, 0, 5)] == [(1, 0, 0)]
    assert len(modular_basis(12, 0, 5)) == 2
    assert len(modular_basis(2, 0, 5)) == 0
    # weight 2 with a pole of order 1: only E4^2 E6 / Delta
    basis = modular_basis(2, 1, 5)
    assert [k for k, _ in basis] == [(2, 1, 1)]
    for key, s in basis:
        assert s.valuation == -1


def test_zagier_g_matches_traces():
    g = zagier_g(5, 6)
    assert g.kernel_dimension == 0
    series = plus_space_series(g, 20)
    assert series[-5] == 1
    for d in admissible_d(1, 5, 20):
        assert series[d] == -twisted_trace("J(z)", 1, 5, d)


def test_zagier_g8():
    g = zagier_g(8, 6)
    series = plus_space_series(g, 20)
    assert series[-8] == 1
    for d in admissible_d(1, 8, 20):
        assert series[d] == -twisted_trace("J(z)", 1, 8, d)


@pytest.mark.parametrize("Delta,n", [(5, 2), (5, 3), (8, 2)])
def test_dual_trace_is_g_coefficient(Delta, n):
    series = plus_space_series(zagier_g(Delta * n * n, 6), 20)
    for d in (3, 4, 7, 8, 11, 15, 19, 20):
        assert series.get(d, 0) == -dual_trace("J(z)", Delta, n, d)


def test_targets_from_negative_traces(paper_parts):
    assert lift_targets(paper_parts, 11, 5, 7) == {-5: 1, -605: 11}
    assert lift_targets(paper_parts, 11, 1, 1) == {-1: 1, -121: 11}
    assert lift_targets(paper_parts, 11, 12, 10) == {-12: 1, -1452: 11}


def test_phi1_trace_of_minimal_polynomial(phi1):
    # D = 40: both classes of [407, 90, 5] and [1001, 200, 10], each counted twice
    assert jacobi_coeff(phi1, 1, 2) == -425691312


def test_phi1_reference_coefficients(phi1):
    assert phi1.kernel_dimension == 0
    assert {r: phi1.coefficient(0, r) for r in range(-12, 13) if phi1.coefficient(0, r)} == PHI1_Q0
    for r, c in PHI1_Q1.items():
        assert phi1.coefficient(1, r) == c
        assert phi1.coefficient(1, -r) == c


def test_phi5_reference_coefficients(phi5):
    assert phi5.kernel_dimension == 0
    assert {r: phi5.coefficient(-11, r) for r in range(-40, 41) if phi5.coefficient(-11, r)} == {-11: 11, 11: 11}
    for r, c in PHI5_Q1.items():
        assert phi5.coefficient(1, r) == c
        assert phi5.coefficient(1, -r) == c


def test_phi5_matches_traces(phi5):
    # c(n, r) = -1/2 t(h = r, (4Nn - r^2)/4N) for positive discriminants
    assert jacobi_coeff(phi5, 1, 6) == -380712960 // 2
    for n in (0, 1):
        for r in range(-25, 26):
            D = 44 * n - r * r
            if D <= 0:
                continue
            t = trace_positive("J(11z)", 11, 5, 7, r, Fraction(5 * D, 44)).value
            assert jacobi_coeff(phi5, n, r) == -t / 2


def test_negative_discriminants_only_at_targets(phi5):
    for n, r, c in phi5.terms():
        D = 44 * n - r * r
        if D < 0 and c:
            assert D in (-5, -605)
    assert check_discriminant_dependence(phi5)
    assert check_symmetry(phi5)


def test_discriminant_dependence_detects_violation():
    a = gen_a(3)
    bad = JacobiSeries(a.weight, a.index, a.series + FormalSeries.from_dict({1: ZetaPolynomial({2: 1})}, 3))
    assert not check_symmetry(bad)
    assert not check_discriminant_dependence(bad)


def test_plus_space_single_valued():
    with pytest.raises(JacobiError):
        bad = JacobiSeries(-2, 1, FormalSeries.from_dict({0: ZetaPolynomial({0: 1}), 1: ZetaPolynomial({2: 3})}, 2))
        plus_space_series(bad, 10)


def test_solver_errors():
    with pytest.raises(ValueError):
        solve_principal_part(3, 1, {-3: 1}, 2)
    with pytest.raises(ValueError):
        solve_principal_part(2, 1, {3: 1}, 2)
    with pytest.raises(JacobiError):
        solve_principal_part(2, 1, {-2: 1}, 2)


def test_solver_kernel_reported():
    # the holomorphic Jacobi Eisenstein series of weight 4 and index 1 is invisible to the constraints
    assert solve_principal_part(4, 1, {}, 3).kernel_dimension == 1
    assert solve_principal_part(0, 1, {}, 3).kernel_dimension == 0
    assert solve_principal_part(2, 1, {}, 3).kernel_dimension == 0


def test_json_roundtrip(phi1):
    text = json.dumps(phi1.to_json())
    back = JacobiSeries.from_json(text)
    assert back == phi1
    assert all(isinstance(t["c"], str) for t in json.loads(text)["terms"])

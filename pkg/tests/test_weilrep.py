import json
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from twtrace.weilrep import (DiscModule, gauss_sum, gauss_sum_direct, matrix_to_json, metaplectic_residual,
                             psi_matrix, rho_S, rho_T, unitarity_residual, verify_intertwining)


def test_module_sizes():
    for N, Delta in [(1, 1), (1, 5), (11, 1), (2, -3), (11, 5)]:
        assert len(DiscModule(N, Delta)) == 2 * N * abs(Delta) ** 3
    m = DiscModule(1, 1)
    assert [m.norm(e) for e in m.elements] == [0, Fraction(3, 4)]
    with pytest.raises(ValueError):
        DiscModule(1, 45)


def test_rho_T_level_one():
    T = rho_T(1, 1)
    assert abs(T[0, 0] - 1) < 1e-30
    assert abs(T[1, 1] - mpmath.expjpi(-0.5)) < 1e-30


def test_rho_T_order():
    m = DiscModule(1, 5)
    order = 1
    for e in m.elements:
        q = m.norm(e)
        order = order * q.denominator // np.gcd(order, q.denominator)
    T = rho_T(1, 5)
    for i in range(T.rows):
        assert abs(abs(T[i, i]) - 1) < 1e-30
        assert abs(T[i, i] ** order - 1) < 1e-25


def test_rho_S_level_one():
    S = rho_S(1, 1)
    c = mpmath.sqrt(mpmath.mpc(0, 1)) / mpmath.sqrt(2)
    expected = [[c, c], [c, -c]]
    for i in range(2):
        for j in range(2):
            assert abs(S[i, j] - expected[i][j]) < 1e-30


@pytest.mark.parametrize("N,Delta", [(1, 1), (11, 1), (1, -3)])
def test_unitary_and_metaplectic(N, Delta):
    bits = 128
    assert unitarity_residual(rho_S(N, Delta, bits), bits) < mpmath.mpf(2) ** -(bits - 10)
    assert unitarity_residual(rho_T(N, Delta, bits), bits) < mpmath.mpf(2) ** -(bits - 10)
    assert metaplectic_residual(N, Delta, bits) < 1e-30


def test_psi_trivial_twist():
    P = psi_matrix(3, 1, 1)
    assert P.shape == (6, 6)
    assert (P == np.eye(6, dtype=np.int64)).all()


def test_psi_twisted_supports():
    P = psi_matrix(1, 5, 1)
    assert P.shape == (250, 2)
    assert set(np.unique(P)) <= {-1, 0, 1}
    assert not np.any((P[:, 0] != 0) & (P[:, 1] != 0))
    P = psi_matrix(11, 5, 7)
    counts = [int(np.count_nonzero(P[:, h])) for h in range(1, 22)]
    assert len(set(counts)) == 1 and counts[0] > 0
    with pytest.raises(ValueError):
        psi_matrix(11, 5, 1)


def test_psi_support_conditions():
    N, Delta, r = 11, 5, 7
    mod = DiscModule(N, Delta)
    P = psi_matrix(N, Delta, r)
    for i, h in zip(*np.nonzero(P)):
        e = mod.elements[i]
        assert mod.project(e) == (r * h) % (2 * N)
        assert mod.norm(e) == Fraction(-h * h, 4 * N) % 1


@pytest.mark.parametrize("N,Delta,r,tol", [(1, 1, 1, 1e-25), (1, 5, 1, 1e-25), (11, 5, 7, 1e-20),
                                           (1, -3, 1, 1e-20), (1, -4, 0, 1e-20)])
def test_intertwining(N, Delta, r, tol):
    assert verify_intertwining(N, Delta, r, 128) < tol


@pytest.mark.parametrize("N,Delta,r", [(1, 5, 1), (1, -3, 1), (11, 5, 7)])
def test_intertwining_shrinks_with_precision(N, Delta, r):
    res = [verify_intertwining(N, Delta, r, b) for b in (64, 128, 256)]
    assert res[0] > res[1] > res[2]


def test_intertwining_detects_wrong_map():
    # flipping one sign of psi breaks the relation
    from twtrace.weilrep import s_action_on_psi
    P = psi_matrix(1, 5, 1).copy()
    i = int(np.nonzero(P[:, 1])[0][0])
    P[i, 1] = -P[i, 1]
    mod, _, X = s_action_on_psi(1, 5, 1, 128, psi=P)
    good_mod, good_P, good_X = s_action_on_psi(1, 5, 1, 128)
    assert max(abs(X[k][h] - good_X[k][h]) for k in range(len(mod)) for h in range(2)) > 1e-3


def test_gauss_sum_trivial():
    assert abs(gauss_sum(5, 5, 1, 0, 0)) < 1e-30
    assert abs(gauss_sum_direct(5, 5, 1, 0, 0)) < 1e-30
    with pytest.raises(ValueError):
        gauss_sum(5, 12, 1, 0, 0)


def random_tuple(rng):
    Delta = rng.choice([5, -3, -4, 8, -7, 12, 13, -8, -15])
    d = abs(Delta)
    M = d * rng.randint(1, 60 // d)
    return Delta, M, rng.randint(-30, 30), rng.randint(-30, 30), rng.randint(-80, 80)


def test_gauss_sum_closed_form_vs_direct():
    rng = random.Random(57)
    with mpmath.workprec(128):
        for _ in range(500):
            Delta, M, a, b, n = random_tuple(rng)
            assert abs(gauss_sum(Delta, M, a, b, n) - gauss_sum_direct(Delta, M, a, b, n)) < 1e-25


def test_gauss_sum_vanishing():
    rng = random.Random(58)
    hits = 0
    with mpmath.workprec(128):
        for _ in range(400):
            Delta, M, a, b, n = random_tuple(rng)
            if n % (M // abs(Delta)):
                hits += 1
                assert gauss_sum(Delta, M, a, b, n) == 0
                assert abs(gauss_sum_direct(Delta, M, a, b, n)) < 1e-25
    assert hits > 100


def test_matrix_json():
    data = json.loads(matrix_to_json(rho_S(1, 1)))
    assert len(data) == 2 and len(data[0]) == 2
    assert all(isinstance(x, str) for x in data[0][0])

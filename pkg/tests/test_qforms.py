import random
from fractions import Fraction
from math import gcd, isqrt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twtrace.arith import sqrts_mod_4N
from twtrace.qforms import (CMPoint, HeegnerClassSet, QuadForm, act, cm_point, gamma0_equivalent,
                            heegner_classes, is_reduced, reduce_gauss, reduced_forms, stabilizer_order)


def random_sl2(rng, bound=6):
    while True:
        a, c = rng.randint(-bound, bound), rng.randint(-bound, bound)
        if gcd(a, c) != 1:
            continue
        # extended Euclid for a d - b c = 1
        x0, y0, r0, r1 = 1, 0, a, c
        x1, y1 = 0, 1
        while r1:
            q = r0 // r1
            r0, r1 = r1, r0 - q * r1
            x0, x1 = x1, x0 - q * x1
            y0, y1 = y1, y0 - q * y1
        d, b = x0 * r0, -y0 * r0
        t = rng.randint(-3, 3)
        g = ((a, b + t * a), (c, d + t * c))
        assert g[0][0] * g[1][1] - g[0][1] * g[1][0] == 1
        return g


def random_gamma0(rng, N, bound=6):
    while True:
        g = random_sl2(rng, bound * N)
        if g[1][0] % N == 0:
            return g


def xgcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def equiv_oracle(Q1, Q2, N):
    """Search for g in Gamma_0(N) with Q1 o g = Q2 directly from representations of Q2.a."""
    if Q1.disc != Q2.disc or (Q1.a > 0) != (Q2.a > 0):
        return False
    if Q1.a < 0:
        Q1, Q2 = -Q1, -Q2
    n, D = Q2.a, -Q1.disc
    ymax = isqrt(4 * Q1.a * n // D) + 1
    xmax = isqrt(4 * Q1.c * n // D) + 1
    for gam in range(-ymax, ymax + 1):
        if gam % N:
            continue
        for al in range(-xmax, xmax + 1):
            if Q1(al, gam) != n or gcd(al, gam) != 1:
                continue
            g0, u, v = xgcd(al, gam)
            u, v = u * g0, v * g0
            g = ((al, -v), (gam, u))
            b0 = act(g, Q1).b
            if (Q2.b - b0) % (2 * n) == 0:
                return True
    return False


def test_act_identity_and_translation():
    Q = QuadForm(1, 0, 1)
    assert act(((1, 0), (0, 1)), Q) == Q
    assert act(((1, 1), (0, 1)), Q) == QuadForm(1, 2, 2)
    with pytest.raises(ValueError):
        act(((2, 0), (0, 1)), Q)


def test_act_preserves_discriminant_and_is_right_action():
    rng = random.Random(3)
    for _ in range(100):
        Q = QuadForm(rng.randint(-20, 20), rng.randint(-20, 20), rng.randint(-20, 20))
        g, h = random_sl2(rng), random_sl2(rng)
        assert act(g, Q).disc == Q.disc
        gh = ((g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]),
              (g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]))
        assert act(gh, Q) == act(h, act(g, Q))


def test_stabilizer_orders():
    assert stabilizer_order(QuadForm(407, 90, 5), 11) == 1
    assert stabilizer_order(QuadForm(1, 0, 1), 1) == 2
    assert stabilizer_order(QuadForm(1, 1, 1), 1) == 3
    with pytest.raises(ValueError):
        stabilizer_order(QuadForm(1, 0, -1))


def test_cm_points():
    z = cm_point(QuadForm(407, 90, 5))
    assert z == CMPoint(Fraction(-90, 814), Fraction(40, 814 ** 2))
    assert cm_point(QuadForm(1, 0, 1)) == CMPoint(Fraction(0), Fraction(1))
    assert cm_point(QuadForm(1, 1, 1)) == CMPoint(Fraction(-1, 2), Fraction(3, 4))
    with pytest.raises(ValueError):
        cm_point(QuadForm(-1, 1, -1))


def test_reduce_gauss_examples():
    R, M = reduce_gauss(QuadForm(1, 0, 1))
    assert R == QuadForm(1, 0, 1) and M == ((1, 0), (0, 1))
    R, M = reduce_gauss(QuadForm(407, 90, 5))
    assert R in (QuadForm(1, 0, 10), QuadForm(2, 0, 5))
    assert act(M, QuadForm(407, 90, 5)) == R
    with pytest.raises(ValueError):
        reduce_gauss(QuadForm(1, 3, 1))


@settings(max_examples=100)
@given(st.integers(1, 60), st.integers(-60, 60), st.integers(1, 60))
def test_reduce_gauss_contract(a, b, c):
    Q = QuadForm(a, b, c)
    if Q.disc >= 0:
        return
    R, M = reduce_gauss(Q)
    assert is_reduced(R)
    assert act(M, Q) == R


def test_reduced_forms_exhaustive():
    for D in range(-3, -200, -1):
        if D % 4 not in (0, 1):
            continue
        brute = sorted((a, b, (b * b - D) // (4 * a)) for a in range(1, 60) for b in range(-a, a + 1)
                       if (b * b - D) % (4 * a) == 0 and is_reduced(QuadForm(a, b, (b * b - D) // (4 * a))))
        assert sorted(tuple(Q.as_list()) for Q in reduced_forms(D)) == brute


def test_heegner_paper_example():
    hs = heegner_classes(11, -40, 2)
    expected = [QuadForm(1001, 200, 10), QuadForm(-1001, 200, -10), QuadForm(407, 90, 5), QuadForm(-407, 90, -5)]
    assert len(hs.reps) == 4
    assert len(hs.positive()) == 2
    for P in expected:
        assert sum(equiv_oracle(Q, P, 11) for Q, _ in hs.reps) == 1


def test_heegner_level_one():
    hs = heegner_classes(1, -3, 1)
    assert hs.positive() == [(QuadForm(1, 1, 1), 3)]
    with pytest.raises(ValueError):
        heegner_classes(11, -41, 2)


def test_heegner_invariants():
    for N in (1, 5, 11):
        for D in range(-3, -120, -1):
            for beta in sqrts_mod_4N(D, N):
                hs = heegner_classes(N, D, beta)
                for Q, s in hs.reps:
                    assert Q.disc == D and Q.a % N == 0 and (Q.b - beta) % (2 * N) == 0
                    assert s == stabilizer_order(Q, N)


@pytest.mark.parametrize("N,D", [(1, -39), (5, -31), (11, -40), (11, -35), (5, -20), (1, -36)])
def test_heegner_complete_and_irredundant(N, D):
    """Oracle: every form in a box is equivalent to exactly one representative."""
    for beta in sqrts_mod_4N(D, N):
        reps = [Q for Q, _ in heegner_classes(N, D, beta).positive()]
        for i, Q1 in enumerate(reps):
            for Q2 in reps[i + 1:]:
                assert not equiv_oracle(Q1, Q2, N)
        for a in range(N, 8 * N + 1, N):
            for b in range(-2 * a, 2 * a + 1):
                if (b - beta) % (2 * N) or (b * b - D) % (4 * a):
                    continue
                P = QuadForm(a, b, (b * b - D) // (4 * a))
                assert sum(equiv_oracle(Q, P, N) for Q in reps) == 1, P


def test_gamma0_equivalence_matches_oracle():
    rng = random.Random(11)
    for _ in range(60):
        N = rng.choice([1, 5, 11])
        D = -rng.choice([15, 20, 23, 40, 35, 39])
        roots = sqrts_mod_4N(D, N)
        if not roots:
            continue
        beta = rng.choice(roots)
        reps = [Q for Q, _ in heegner_classes(N, D, beta).reps]
        Q = rng.choice(reps)
        P = act(random_gamma0(rng, N), Q)
        assert gamma0_equivalent(Q, P, N) and equiv_oracle(Q, P, N)
        for R in reps:
            assert gamma0_equivalent(R, P, N) == equiv_oracle(R, P, N)


def test_class_set_json_roundtrip():
    hs = heegner_classes(11, -40, 2)
    back = HeegnerClassSet.from_json(hs.to_json())
    assert back.reps == hs.reps and back.N == 11 and back.D == -40

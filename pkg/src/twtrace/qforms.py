"""
Integral binary quadratic forms [a, b, c] = a x^2 + b x y + c y^2.

Forms act by substitution: ``act(g, Q) = Q o g``, so ``act(g*h, Q) =
act(h, act(g, Q))``.  Heegner forms at level N are normalized with
``a = 0 (mod N)``; this condition and ``b mod 2N`` are preserved by
Gamma_0(N) under substitution.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from .arith import is_square

Matrix = tuple[tuple[int, int], tuple[int, int]]

IDENTITY: Matrix = ((1, 0), (0, 1))


def mat_mul(g: Matrix, h: Matrix) -> Matrix:
    (a, b), (c, d) = g
    (e, f), (k, l) = h
    return ((a * e + b * k, a * f + b * l), (c * e + d * k, c * f + d * l))


def mat_inv(g: Matrix) -> Matrix:
    (a, b), (c, d) = g
    if a * d - b * c != 1:
        raise ValueError("matrix is not in SL2(Z)")
    return ((d, -b), (-c, a))


def det(g: Matrix) -> int:
    (a, b), (c, d) = g
    return a * d - b * c


@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def __neg__(self) -> "QuadForm":
        return QuadForm(-self.a, -self.b, -self.c)

    @property
    def content(self) -> int:
        return gcd(gcd(self.a, self.b), self.c)

    def is_positive_definite(self) -> bool:
        return self.disc < 0 and self.a > 0

    def is_negative_definite(self) -> bool:
        return self.disc < 0 and self.a < 0

    def as_list(self) -> list[int]:
        return [self.a, self.b, self.c]

    def __repr__(self):
        return f"[{self.a},{self.b},{self.c}]"


def act(g: Matrix, Q: QuadForm) -> QuadForm:
    """Substitution (x, y) -> (alpha x + beta y, gamma x + delta y)."""
    (al, be), (ga, de) = g
    if al * de - be * ga != 1:
        raise ValueError("matrix must have determinant 1")
    a, b, c = Q.a, Q.b, Q.c
    return QuadForm(
        a * al * al + b * al * ga + c * ga * ga,
        2 * a * al * be + b * (al * de + be * ga) + 2 * c * ga * de,
        a * be * be + b * be * de + c * de * de,
    )


def is_reduced(Q: QuadForm) -> bool:
    a, b, c = Q.a, Q.b, Q.c
    if not (abs(b) <= a <= c):
        return False
    if (abs(b) == a or a == c) and b < 0:
        return False
    return True


def reduce_gauss(Q: QuadForm) -> tuple[QuadForm, Matrix]:
    """Reduce a positive definite form; returns (R, M) with act(M, Q) = R."""
    if not Q.is_positive_definite():
        raise ValueError(f"{Q} is not positive definite")
    M = IDENTITY
    R = Q
    while True:
        a, b, c = R.a, R.b, R.c
        # bring b into (-a, a]
        k = (a - b) // (2 * a)
        if k:
            T = ((1, k), (0, 1))
            R = act(T, R)
            M = mat_mul(M, T)
            a, b, c = R.a, R.b, R.c
        if a > c or (a == c and b < 0):
            S = ((0, -1), (1, 0))
            R = act(S, R)
            M = mat_mul(M, S)
            continue
        return R, M


@lru_cache(maxsize=None)
def reduced_forms(D: int) -> tuple[QuadForm, ...]:
    """All reduced positive definite forms of discriminant D < 0, primitive or not."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")
    out = []
    amax = isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            Q = QuadForm(a, b, c)
            if c >= a and is_reduced(Q):
                out.append(Q)
    return tuple(out)


def automorphs(Q: QuadForm) -> list[Matrix]:
    """All g in SL2(Z) with act(g, Q) = Q, for Q definite."""
    if Q.disc >= 0:
        raise ValueError("indefinite forms have infinite automorphism groups")
    g = Q.content
    a, b, c = Q.a // g, Q.b // g, Q.c // g
    D = b * b - 4 * a * c
    sols = []
    # t^2 - D u^2 = 4
    umax = isqrt(4 // -D) if -D <= 4 else 0
    for u in range(-umax, umax + 1):
        t2 = 4 + D * u * u
        if t2 < 0 or not is_square(t2):
            continue
        t = isqrt(t2)
        for tt in {t, -t}:
            if (tt - b * u) % 2:
                continue
            m = (((tt - b * u) // 2, -c * u), (a * u, (tt + b * u) // 2))
            sols.append(m)
    sols = sorted(set(sols))
    assert all(act(m, Q) == Q for m in sols)
    return sols


def _in_gamma0(g: Matrix, N: int) -> bool:
    return g[1][0] % N == 0


def stabilizer_order(Q: QuadForm, N: int = 1) -> int:
    """Order of the stabilizer of Q in the image of Gamma_0(N) in PSL2(Z)."""
    if Q.disc >= 0:
        raise ValueError("stabilizer order is only defined for definite forms")
    return sum(1 for g in automorphs(Q) if _in_gamma0(g, N)) // 2


@dataclass(frozen=True)
class CMPoint:
    """x + i*sqrt(y2) with exact rationals x and y2 > 0."""

    x: Fraction
    y2: Fraction

    def to_mpc(self, ctx=None):
        import mpmath

        ctx = ctx or mpmath.mp
        return ctx.mpc(ctx.mpf(self.x.numerator) / self.x.denominator,
                       ctx.sqrt(ctx.mpf(self.y2.numerator) / self.y2.denominator))

    def form(self) -> QuadForm:
        """The primitive positive definite form whose root is this point."""
        # a z^2 + b z + c with z = x + i y: b = -2 a x, c = a (x^2 + y^2)
        x, y2 = self.x, self.y2
        den = 1
        for q in (x.denominator, (x * x + y2).denominator):
            den = den * q // gcd(den, q)
        a = den
        b = -2 * a * x
        c = a * (x * x + y2)
        nums = [a, b, c]
        if any(Fraction(v).denominator != 1 for v in nums):
            raise ValueError("point is not a CM point")
        a, b, c = (int(v) for v in nums)
        g = gcd(gcd(a, b), c)
        return QuadForm(a // g, b // g, c // g)

    def scale(self, k: int) -> "CMPoint":
        return CMPoint(self.x * k, self.y2 * k * k)


def cm_point(Q: QuadForm) -> CMPoint:
    """alpha_Q = (-b + i sqrt|D|)/(2a) for positive definite Q."""
    if Q.a <= 0 or Q.disc >= 0:
        raise ValueError(f"{Q} is not positive definite")
    return CMPoint(Fraction(-Q.b, 2 * Q.a), Fraction(-Q.disc, 4 * Q.a * Q.a))


def moebius(g: Matrix, z: CMPoint) -> CMPoint:
    """g.z for a CM point z, exactly."""
    (a, b), (c, d) = g
    x, y2 = z.x, z.y2
    # (a z + b)/(c z + d) = ((a z + b)(c zbar + d)) / |c z + d|^2
    n2 = (c * x + d) ** 2 + c * c * y2
    re = ((a * x + b) * (c * x + d) + a * c * y2) / n2
    im2 = y2 / (n2 * n2)
    return CMPoint(Fraction(re), Fraction(im2))


def reduce_point(z: CMPoint) -> tuple[CMPoint, Matrix]:
    """Move a CM point to the standard fundamental domain; returns (w, g) with w = g.z."""
    Q = z.form()
    R, M = reduce_gauss(Q)
    # root of Q o M is M^{-1}.z
    g = mat_inv(M)
    w = moebius(g, z)
    return w, g


# ---------------------------------------------------------------------------
# Gamma_0(N) classes


def _p1_points(N: int) -> list[tuple[int, int]]:
    """Canonical representatives of P^1(Z/N)."""
    if N == 1:
        return [(0, 1)]
    seen = set()
    out = []
    units = [u for u in range(1, N) if gcd(u, N) == 1]
    for x in range(N):
        for y in range(N):
            if gcd(gcd(x, y), N) != 1:
                continue
            key = _p1_normalize(x, y, N, units)
            if key not in seen:
                seen.add(key)
                out.append(key)
    return sorted(out)


def _p1_normalize(x: int, y: int, N: int, units=None) -> tuple[int, int]:
    if N == 1:
        return (0, 1)
    if units is None:
        units = [u for u in range(1, N) if gcd(u, N) == 1]
    return min(((u * x) % N, (u * y) % N) for u in units)


def _lift_column(x: int, y: int, N: int) -> Matrix:
    """A matrix in SL2(Z) whose first column reduces to (x, y) mod N."""
    if x == 0:
        x = N
    k = 0
    while gcd(x, y + k * N) != 1:
        k += 1
    y = y + k * N
    # x u + y v = 1
    g, u, v = _xgcd(x, y)
    return ((x, -v), (y, u))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _orbit_key(R: QuadForm, col: tuple[int, int], N: int) -> tuple[int, int]:
    """Canonical P^1(Z/N) point of the Aut(R)-orbit of ``col``."""
    best = None
    for (p, q), (r, s) in automorphs(R):
        x, y = col
        pt = _p1_normalize((p * x + q * y) % N, (r * x + s * y) % N, N)
        if best is None or pt < best:
            best = pt
    return best


def class_key(Q: QuadForm, N: int) -> tuple:
    """Invariant deciding Gamma_0(N)-equivalence of definite forms."""
    sgn = 1
    if Q.a < 0:
        Q, sgn = -Q, -1
    R, M = reduce_gauss(Q)
    # Q = R o M^{-1}; the coset of M^{-1} is its first column mod N
    g = mat_inv(M)
    col = (g[0][0] % N, g[1][0] % N) if N > 1 else (0, 1)
    return (sgn, R, _orbit_key(R, col, N))


def gamma0_equivalent(Q1: QuadForm, Q2: QuadForm, N: int) -> bool:
    if Q1.disc != Q2.disc:
        return False
    return class_key(Q1, N) == class_key(Q2, N)


@dataclass
class HeegnerClassSet:
    N: int
    D: int
    beta: int
    reps: list[tuple[QuadForm, int]]

    def positive(self) -> list[tuple[QuadForm, int]]:
        return [(Q, s) for Q, s in self.reps if Q.a > 0]

    def negative(self) -> list[tuple[QuadForm, int]]:
        return [(Q, s) for Q, s in self.reps if Q.a < 0]

    def to_json(self) -> dict:
        return {"N": self.N, "D": self.D, "beta": self.beta,
                "reps": [[Q.a, Q.b, Q.c, s] for Q, s in self.reps]}

    @classmethod
    def from_json(cls, data) -> "HeegnerClassSet":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["N"], data["D"], data["beta"],
                   [(QuadForm(a, b, c), s) for a, b, c, s in data["reps"]])


@lru_cache(maxsize=None)
def _positive_classes(N: int, D: int, beta: int) -> tuple[tuple[QuadForm, int], ...]:
    out = []
    pts = _p1_points(N)
    for R in reduced_forms(D):
        seen = set()
        for pt in pts:
            if R(*pt) % N:
                continue
            key = _orbit_key(R, pt, N)
            if key in seen:
                continue
            seen.add(key)
            g = _lift_column(*key, N) if N > 1 else IDENTITY
            Q = act(g, R)
            if (Q.b - beta) % (2 * N):
                continue
            out.append((_small_rep(Q, N), stabilizer_order(Q, N)))
    return tuple(out)


def _small_rep(Q: QuadForm, N: int) -> QuadForm:
    """Shrink b into (-N|a|... ) by Gamma_0(N)-translations x -> x + k y (keeps b mod 2N)."""
    a = Q.a
    k = -(Q.b // (2 * a)) if a else 0
    # translation by k changes b by 2ak; 2a is a multiple of 2N so b mod 2N is kept
    cand = [act(((1, t), (0, 1)), Q) for t in (k - 1, k, k + 1)]
    return min(cand, key=lambda F: (abs(F.b), -F.b))


def heegner_classes(N: int, D: int, beta: int) -> HeegnerClassSet:
    """Gamma_0(N)-classes of definite forms [a,b,c] with b^2-4ac = D, N | a, b = beta (mod 2N).

    Both positive and negative definite classes are returned, each with the
    order of its stabilizer in the image of Gamma_0(N) in PSL2(Z).
    """
    if N < 1:
        raise ValueError("level must be positive")
    if D >= 0:
        raise ValueError("discriminant must be negative")
    if (beta * beta - D) % (4 * N):
        raise ValueError(f"D={D} is not congruent to beta^2={beta}^2 mod {4 * N}")
    beta %= 2 * N
    pos = list(_positive_classes(N, D, beta))
    neg = [(-Q, s) for Q, s in _positive_classes(N, D, (-beta) % (2 * N))]
    return HeegnerClassSet(N, D, beta, pos + neg)

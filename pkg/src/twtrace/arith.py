"""
Exact number-theoretic primitives: Kronecker symbols, fundamental
discriminants and their prime-discriminant factorizations, square roots
modulo 4N.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import gcd, isqrt


def factor(n: int) -> dict[int, int]:
    """Trial-division factorization of |n| (inputs here are desk-scale)."""
    n = abs(n)
    out: dict[int, int] = {}
    if n == 0:
        raise ValueError("cannot factor 0")
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factor(n).values())


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n), extended to all integers n.

    Uses (D/-1) = sign(D), (D/0) = 1 iff |D| = 1, and (D/2) from D mod 8.
    """
    if n == 0:
        return 1 if D in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    # power of two
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 == 1 and D % 8 in (3, 5):
            result = -result
    # n odd, positive: Jacobi symbol (D mod n / n)
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_discriminant(D: int) -> bool:
    return D != 0 and D % 4 in (0, 1)


def is_fundamental(D: int) -> bool:
    if D == 1:
        return True
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


class Discriminant(int):
    """An integer discriminant (nonzero, 0 or 1 mod 4)."""

    def __new__(cls, value: int):
        value = int(value)
        if not is_discriminant(value):
            raise ValueError(f"{value} is not a discriminant")
        return super().__new__(cls, value)

    @property
    def is_fundamental(self) -> bool:
        return is_fundamental(int(self))


@lru_cache(maxsize=None)
def prime_discriminants(D: int) -> tuple[int, ...]:
    """Prime-discriminant factors of a fundamental discriminant D (D = 1 -> ())."""
    if not is_fundamental(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    out = []
    for p in sorted(factor(D)):
        if p == 2:
            continue
        out.append(p if p % 4 == 1 else -p)
    odd = 1
    for q in out:
        odd *= q
    rest = D // odd
    if rest != 1:
        # rest is one of -4, 8, -8
        out.insert(0, rest)
    return tuple(out)


def discriminant_splittings(D: int) -> list[tuple[int, int]]:
    """All ordered pairs (D1, D2) of discriminants with D1*D2 = D.

    For fundamental D these are products of complementary subsets of the
    prime discriminants of D.
    """
    D = int(D)
    primes = prime_discriminants(D)
    out = set()
    for k in range(len(primes) + 1):
        for sub in combinations(range(len(primes)), k):
            d1 = 1
            for i in sub:
                d1 *= primes[i]
            out.add((d1, D // d1))
    return sorted(out, key=lambda t: (abs(t[0]), t[0]))


def sqrts_mod_4N(D: int, N: int) -> list[int]:
    """Residues r in [0, 2N) with r^2 = D (mod 4N)."""
    if N <= 0:
        raise ValueError("N must be positive")
    M = 4 * N
    return [r for r in range(2 * N) if (r * r - D) % M == 0]


def is_square_mod(n: int, M: int) -> bool:
    n %= M
    return any((x * x - n) % M == 0 for x in range(M // 2 + 1))


def crt_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m (m >= 1)."""
    if m == 1:
        return 0
    if gcd(a, m) != 1:
        raise ValueError(f"{a} is not invertible mod {m}")
    return pow(a, -1, m)


def sign(x) -> int:
    return (x > 0) - (x < 0)

"""
The generalized genus character chi_Delta on binary quadratic forms and on
elements of the dual lattice, by the Gross-Kohnen-Zagier product formula and
by an independent represented-number search.
"""

from __future__ import annotations

from math import gcd

from .arith import discriminant_splittings, divisors, is_square_mod, kronecker
from .qforms import QuadForm


class SearchExhausted(RuntimeError):
    """No represented value coprime to Delta was found inside the search box."""


def _split_level_form(N: int, Q: QuadForm) -> tuple[int, int, int] | None:
    """Write Q as [a, b, N c] (up to the symmetry [A,B,C] <-> [C,B,A])."""
    if Q.c % N == 0:
        return Q.a, Q.b, Q.c // N
    if Q.a % N == 0:
        return Q.c, Q.b, Q.a // N
    return None


def _admissible(Delta: int, N: int, Q: QuadForm) -> tuple[int, int, int] | None:
    parts = _split_level_form(N, Q)
    if parts is None:
        raise ValueError(f"{Q} has no coefficient divisible by N={N}")
    a, b, c = parts
    D = Q.disc
    if D % Delta:
        return None
    if not is_square_mod(D // Delta, 4 * N):
        return None
    if gcd(gcd(gcd(a, b), c), Delta) != 1:
        return None
    return parts


def chi_delta(Delta: int, N: int, Q: QuadForm, check: bool = False) -> int:
    """chi_Delta(Q) for a form with N | c (or N | a), via the GKZ product formula.

    With Q = [a, b, N c] and any factorizations Delta = D1*D2 into
    discriminants, N = N1*N2 with (D1, N1 a) = (D2, N2 c) = 1, the value is
    (D1 / N1 a)(D2 / N2 c).  ``check`` evaluates every admissible
    factorization and asserts they agree.
    """
    if Delta == 1:
        parts = _split_level_form(N, Q)
        if parts is None:
            raise ValueError(f"{Q} has no coefficient divisible by N={N}")
        return 1
    parts = _admissible(Delta, N, Q)
    if parts is None:
        return 0
    a, b, c = parts
    value = None
    for D1, D2 in discriminant_splittings(Delta):
        for N1 in divisors(N):
            N2 = N // N1
            if gcd(D1, N1 * a) != 1 or gcd(D2, N2 * c) != 1:
                continue
            v = kronecker(D1, N1 * a) * kronecker(D2, N2 * c)
            if not check:
                return v
            if value is None:
                value = v
            elif v != value:
                raise AssertionError(f"splitting dependence for {Q}, Delta={Delta}")
    return value or 0


def chi_delta_oracle(Delta: int, N: int, Q: QuadForm, bound: int = 60) -> int:
    """chi_Delta(Q) = (Delta/n) for any n represented by Q with (n, Delta) = 1."""
    if _admissible(Delta, N, Q) is None and Delta != 1:
        return 0
    for radius in range(1, bound + 1):
        for x in range(-radius, radius + 1):
            for y in (-radius, radius) if abs(x) != radius else range(-radius, radius + 1):
                n = Q(x, y)
                if n and gcd(n, Delta) == 1:
                    return kronecker(Delta, n)
    raise SearchExhausted(f"no value of {Q} coprime to {Delta} with |x|,|y| <= {bound}")


def lattice_form(N: int, a: int, b: int, c: int) -> QuadForm:
    """The form [a, b, N c] attached to the dual-lattice element (b/2N, -a/N; c, -b/2N)."""
    return QuadForm(a, b, N * c)


def chi_lattice(Delta: int, N: int, a: int, b: int, c: int) -> int:
    """chi_Delta on the dual-lattice element with coordinates (a, b, c)."""
    if a == 0 and b == 0 and c == 0:
        return 1 if Delta == 1 else 0
    Q = lattice_form(N, a, b, c)
    if Delta == 1:
        return 1
    parts = _admissible(Delta, N, Q)
    if parts is None:
        return 0
    aa, bb, cc = parts
    for D1, D2 in discriminant_splittings(Delta):
        for N1 in divisors(N):
            N2 = N // N1
            if gcd(D1, N1 * aa) == 1 and gcd(D2, N2 * cc) == 1:
                return kronecker(D1, N1 * aa) * kronecker(D2, N2 * cc)
    return 0


def fricke(Q: QuadForm, N: int) -> QuadForm:
    """Image of [N a', b, c] under the Fricke involution z -> -1/(N z): [N c, -b, a']."""
    if Q.a % N:
        raise ValueError("Fricke action is defined here on forms with N | a")
    return QuadForm(N * Q.c, -Q.b, Q.a // N)

"""
Twisted traces of CM values and the Fourier coefficients of the twisted lift.

Index conventions used throughout:

* ``trace_positive`` takes ``m`` as the norm Q(lambda) = -D/4N of the lattice
  vectors being summed, so the Heegner forms have discriminant D = -4Nm.
* A ``LiftExpansion`` is keyed by the lift exponent, i.e. the q-power of the
  component I_h.  Positive exponents are d/4N with Q(lambda) = |Delta| d/4N;
  negative ones are -|Delta| k'^2/4N.  In Jacobi language the exponent times
  4N is the discriminant 4Nn - r^2.

Traces are normalized by 1/sqrt(Delta) (with sqrt(Delta) = i sqrt|Delta| for
Delta < 0), which makes them rational.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import mpmath
from sympy import isprime as is_prime

from .arith import divisors, is_fundamental, is_square_mod, is_squarefree, kronecker, sign, sqrts_mod_4N
from .cmeval import (Atom, BinOp, CertifiedComplex, Const, ModFuncExpr, Neg, Pow, PrecisionError,
                     eval_modfunc, parse_modfunc, recognize_integer)
from .genus import chi_delta, chi_lattice
from .qforms import cm_point, heegner_classes
from .qseries import FormalSeries, eisenstein_qexp, faber_Jm, j_qexp

MAX_BITS = 2048


# ---------------------------------------------------------------------------
# cusps of Gamma_0(N)


@dataclass(frozen=True)
class Cusp:
    label: str
    sigma: tuple  # ((alpha, b), (beta, d)) in SL2(Z), sigma(oo) = alpha/beta
    width: int
    beta: Fraction
    eps: Fraction

    @property
    def point(self) -> tuple[int, int]:
        return self.sigma[0][0], self.sigma[1][0]


@dataclass
class CuspData:
    N: int
    cusps: list[Cusp]

    def __getitem__(self, label: str) -> Cusp:
        for c in self.cusps:
            if c.label == label:
                return c
        raise KeyError(label)

    def index(self) -> int:
        return sum(c.width for c in self.cusps)


def _complete(alpha: int, beta: int) -> tuple:
    """An SL2(Z) matrix with first column (alpha, beta)."""
    if beta == 0:
        return ((alpha, 0), (0, alpha))
    # alpha d - b beta = 1
    g, x, y = _xgcd(alpha, beta)
    assert g == 1
    return ((alpha, -y), (beta, x))


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def cusp_data(N: int) -> CuspData:
    """Representatives a/c (c | N, a mod gcd(c, N/c)) of the cusps of Gamma_0(N)."""
    if N < 1:
        raise ValueError("level must be positive")
    out = []
    for c in divisors(N):
        g = gcd(c, N // c)
        for a0 in range(g):
            if gcd(a0, g) != 1 and not (g == 1 and a0 == 0):
                continue
            if c == N:
                alpha, beta, label = 1, 0, "inf"
            else:
                a = a0
                while gcd(a, c) != 1:
                    a += g
                alpha, beta = a, c
                label = "0" if c == 1 else f"{a}/{c}"
            sigma = _complete(alpha, beta)
            width = 1 if beta == 0 else N // gcd(beta * beta, N)
            G = gcd(gcd(alpha * beta, N * alpha * alpha), beta * beta)
            b_l = Fraction(1, G)
            out.append(Cusp(label, sigma, width, b_l, Fraction(width) / b_l))
    return CuspData(N, out)


def isotropic_generator(cusp: Cusp, N: int) -> tuple[Fraction, Fraction, Fraction]:
    """Primitive lambda_l = sigma lambda_oo sigma^-1 scaled into L, as matrix entries (x11, x12, x21)."""
    alpha, beta = cusp.point
    # sigma (0 1; 0 0) sigma^-1 = (-alpha beta, alpha^2; -beta^2, alpha beta)
    G = gcd(gcd(alpha * beta, N * alpha * alpha), beta * beta)
    return Fraction(-alpha * beta, G), Fraction(alpha * alpha, G), Fraction(-beta * beta, G)


def _line_classes(cusp: Cusp, N: int):
    """The points t * v of the line in L' (v = sigma lambda_oo sigma^-1), t in (1/G')Z, G' = gcd(2N ab, N a^2, b^2).

    Returns (G', class step): t = j/G' lies over the class -2N alpha beta j/G' of D = Z/2NZ.
    """
    alpha, beta = cusp.point
    Gp = gcd(gcd(2 * N * alpha * beta, N * alpha * alpha), beta * beta)
    return Gp


def delta_ell(cusp: Cusp, N: int, h: int) -> int:
    """1 if the line meets L + h."""
    return 1 if _line_point(cusp, N, h) is not None else 0


def _line_point(cusp: Cusp, N: int, h: int):
    """Smallest j >= 0 with j/G' * v in L + h, or None."""
    alpha, beta = cusp.point
    Gp = _line_classes(cusp, N)
    G = gcd(gcd(alpha * beta, N * alpha * alpha), beta * beta)
    # multiples of v in L' modulo lambda_l: j ranges over 0 .. G'/G - 1
    for j in range(Gp // G):
        b = -2 * N * alpha * beta * j // Gp
        if (b - h) % (2 * N) == 0:
            return j
    return None


def d_ell(cusp: Cusp, N: int, h: int) -> int | None:
    """Denominator of s where h_l = s lambda_l (None when the line misses L + h)."""
    j = _line_point(cusp, N, h)
    if j is None:
        return None
    alpha, beta = cusp.point
    Gp = _line_classes(cusp, N)
    G = gcd(gcd(alpha * beta, N * alpha * alpha), beta * beta)
    return Fraction(j * G, Gp).denominator


def dconst(Delta: int, r: int, cusp: Cusp, h: int, N: int) -> Fraction:
    """The constant-term coefficient c_{Delta,r}(l, h)."""
    if Delta == 1:
        return Fraction(delta_ell(cusp, N, h))
    rh = (r * h) % (2 * N)
    d = d_ell(cusp, N, rh)
    if d is None or d % abs(Delta):
        return Fraction(0)
    # (rh)'_l = lambda_l / d as a point of L'
    x11, x12, x21 = isotropic_generator(cusp, N)
    x11, x12, x21 = x11 / d, x12 / d, x21 / d
    # (b/2N, -a/N; c, -b/2N)
    b, a, c = x11 * 2 * N, -x12 * N, x21
    if any(v.denominator != 1 for v in (a, b, c)):
        raise ArithmeticError("(rh)'_l is not in L'")
    return Fraction(chi_lattice(Delta, N, int(a), int(b), int(c)))


# ---------------------------------------------------------------------------
# q-expansions of expressions at the cusps oo and 0


def _expand(node, order: int, at_zero: bool, N: int, width: int) -> FormalSeries:
    """Series of node in x = q^(1/width) through x^(order-1)."""
    if isinstance(node, Const):
        return FormalSeries(0, [node.value], order)
    if isinstance(node, Neg):
        return -_expand(node.arg, order, at_zero, N, width)
    if isinstance(node, Pow):
        base = _expand(node.base, order + _pole_allowance(node.base, width, at_zero, N) * abs(node.exp),
                       at_zero, N, width)
        out = base ** node.exp
        return out.truncate(order) if out.order > order else out
    if isinstance(node, BinOp):
        pad = _pole_allowance(node, width, at_zero, N)
        lhs = _expand(node.left, order + pad, at_zero, N, width)
        rhs = _expand(node.right, order + pad, at_zero, N, width)
        if node.op == "+":
            out = lhs + rhs
        elif node.op == "-":
            out = lhs - rhs
        elif node.op == "*":
            out = lhs * rhs
        else:
            out = lhs / rhs
        return out.truncate(order) if out.order > order else out
    if not isinstance(node, Atom):
        raise TypeError(f"unexpected node {node!r}")
    k = node.scale
    if at_zero:
        if N % k:
            raise ValueError(f"scale {k} does not divide the level {N}")
        mult, factor = N // k, Fraction(1, k) ** _atom_weight(node)
    else:
        mult, factor = k * width, Fraction(1)
    base_order = -(-order // mult) + 1
    if node.name == "j":
        s = j_qexp(base_order)
    elif node.name == "J":
        s = j_qexp(base_order) - 744
    elif node.name == "Jm":
        s = faber_Jm(node.m, base_order)
    elif node.name in ("E4", "E6"):
        s = eisenstein_qexp(int(node.name[1]), base_order)
    else:
        raise ValueError("eta quotients need explicitly supplied cusp expansions")
    terms = {n * mult: c * factor for n, c in s.items()}
    return FormalSeries.from_dict(terms, order)


def _atom_weight(atom: Atom) -> int:
    return {"E4": 4, "E6": 6}.get(atom.name, 0)


def _pole_allowance(node, width: int, at_zero: bool, N: int) -> int:
    """Crude bound on how negative the valuation of a subexpression can be (for truncation padding)."""
    if isinstance(node, Atom):
        if node.name in ("j", "J", "Jm"):
            m = node.m if node.name == "Jm" else 1
            return m * (N // node.scale if at_zero else node.scale * width)
        return 0
    if isinstance(node, Const):
        return 0
    if isinstance(node, Neg):
        return _pole_allowance(node.arg, width, at_zero, N)
    if isinstance(node, Pow):
        return _pole_allowance(node.base, width, at_zero, N) * abs(node.exp) + 8
    return _pole_allowance(node.left, width, at_zero, N) + _pole_allowance(node.right, width, at_zero, N) + 8


def cusp_expansion(f: ModFuncExpr | str, N: int, cusp: str = "inf", order: int = 1) -> dict[Fraction, Fraction]:
    """Coefficients a_l(n), n < order/width, of f at the cusp oo or 0 of Gamma_0(N).

    At 0 the expansion is that of f(-1/z), a series in q^(1/N).
    """
    if isinstance(f, str):
        f = parse_modfunc(f)
    if cusp == "inf":
        s = _expand(f, order, False, N, 1)
        return {Fraction(n): Fraction(c) for n, c in s.items()}
    if cusp == "0":
        s = _expand(f, order * N, True, N, N)
        return {Fraction(n, N): Fraction(c) for n, c in s.items()}
    raise ValueError("only the cusps oo and 0 can be expanded automatically")


def principal_parts(f: ModFuncExpr | str, N: int) -> dict[str, dict[Fraction, Fraction]]:
    """Principal parts (n < 0) and constant terms at every cusp, for N = 1 or N prime."""
    if N != 1 and (N < 2 or any(N % p == 0 for p in range(2, int(math.isqrt(N)) + 1))):
        raise ValueError("automatic cusp expansions are only available for N = 1 or N prime")
    out = {"inf": {n: c for n, c in cusp_expansion(f, N, "inf", 1).items() if n <= 0}}
    if N > 1:
        out["0"] = {n: c for n, c in cusp_expansion(f, N, "0", 1).items() if n <= 0}
    return out


# ---------------------------------------------------------------------------
# positive index


@dataclass
class TraceValue:
    value: Fraction
    Delta: int
    error_bound: float
    bits: int
    normalization: str = "sqrtDelta"

    def render(self) -> str:
        """Exact string; the raw normalization is printed as value*sqrt(Delta)."""
        v = self.value
        s = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        if self.normalization == "raw" and self.Delta != 1 and v:
            return f"{s}*sqrt({self.Delta})"
        return s


def _default_bits() -> int:
    import os
    try:
        return int(os.environ.get("TT_BITS", "64"))
    except ValueError:
        return 64


def _class_sum(f, reps, Delta, N, bits, char=None):
    total = CertifiedComplex.exact(0)
    for Q, stab in reps:
        chi = chi_delta(char or Delta, N, Q)
        if not chi:
            continue
        P = -Q if Q.a < 0 else Q
        val = eval_modfunc(f, cm_point(P), bits)
        total = total + val * (6 * chi // stab)
    return total


def _normalize(total: CertifiedComplex, Delta: int) -> CertifiedComplex:
    """Divide by sqrt(Delta), with sqrt(Delta) = i sqrt|Delta| for Delta < 0."""
    root = mpmath.sqrt(abs(Delta))
    denom = mpmath.mpc(root, 0) if Delta > 0 else mpmath.mpc(0, root)
    return total / CertifiedComplex.exact(denom)


def _recognize(f, reps, Delta, N, bits, char=None, scale=1):
    last = None
    b = bits
    while b <= MAX_BITS:
        with mpmath.workprec(b + 64):
            total = _class_sum(f, reps, Delta, N, b, char)
            if Delta != 1:
                total = _normalize(total, Delta)
            if scale != 1:
                total = total / CertifiedComplex.exact(scale)
            try:
                n = recognize_integer(total)
                return Fraction(n, 6), float(total.error_bound) / 6, b
            except PrecisionError as exc:
                last = exc
        b *= 2
    raise PrecisionError(f"trace not recognized up to {MAX_BITS} bits: {last}")


def _check_params(N: int, Delta: int, r: int):
    if N < 1:
        raise ValueError("level must be positive")
    if not is_fundamental(Delta):
        raise ValueError(f"{Delta} is not a fundamental discriminant")
    if r % (2 * N) not in sqrts_mod_4N(Delta, N):
        raise ValueError(f"r={r} is not a square root of {Delta} modulo {4 * N}")


def trace_positive(f: ModFuncExpr | str, N: int, Delta: int, r: int, h: int, m, bits: int | None = None,
                   normalization: str = "sqrtDelta") -> TraceValue:
    """Sum of chi_Delta(lambda)/|Gamma_lambda| f(D_lambda) over Gamma_0(N)-classes of
    lambda in L + rh with Q(lambda) = m, positive and negative definite alike."""
    if isinstance(f, str):
        f = parse_modfunc(f)
    _check_params(N, Delta, r)
    if normalization not in ("sqrtDelta", "raw"):
        raise ValueError("normalization must be 'sqrtDelta' or 'raw'")
    m = Fraction(m)
    if m <= 0:
        raise ValueError("m must be positive")
    D = -4 * N * m
    if D.denominator != 1:
        raise ValueError(f"4N m = {-D} is not an integer")
    D = int(D)
    beta = (r * h) % (2 * N)
    if (D - beta * beta) % (4 * N):
        raise ValueError(f"m={m} does not match the class of h={h}")
    bits = bits or _default_bits()
    reps = heegner_classes(N, D, beta).reps
    if not reps:
        return TraceValue(Fraction(0), Delta, 0.0, bits, normalization)
    value, err, used = _recognize(f, reps, Delta, N, bits)
    return TraceValue(value, Delta, err, used, normalization)


def twisted_trace(f: ModFuncExpr | str, N: int, Delta: int, d: int, bits: int | None = None) -> Fraction:
    """(1/sqrt Delta) sum over positive definite Q of discriminant -d|Delta| with N | a.

    Only Delta > 0: for Delta < 0 and f with real coefficients the class sum
    is real, so the normalized value is not rational.
    """
    if isinstance(f, str):
        f = parse_modfunc(f)
    if Delta < 0:
        raise ValueError("twisted_trace needs Delta > 0; use trace_positive for Delta < 0")
    if d < 1 or not is_square_mod(-d, 4 * N) or not is_square_mod(Delta, 4 * N):
        raise ValueError(f"d={d} is not admissible for N={N}, Delta={Delta}")
    D = -d * abs(Delta)
    reps = []
    for beta in sqrts_mod_4N(D, N):
        reps += heegner_classes(N, D, beta).positive()
    if not reps:
        return Fraction(0)
    return _recognize(f, reps, Delta, N, bits or _default_bits())[0]


def hecke_rhs(f: ModFuncExpr | str, Delta: int, p: int, d: int, bits: int | None = None) -> Fraction:
    """t(f; p^2 d) + (-d/p) t(f; d) + p t(f; d/p^2) at level 1, p prime.

    This is the weight 3/2 Hecke operator T(p^2) on the trace generating
    series, which computes t(f_p; d) where f_p = p (f | T_p) has principal
    part q^-p when f = J.
    """
    if not is_prime(p):
        raise ValueError("p must be prime")
    total = twisted_trace(f, 1, Delta, p * p * d, bits)
    total += kronecker(-d, p) * twisted_trace(f, 1, Delta, d, bits)
    if d % (p * p) == 0 and is_square_mod(-(d // (p * p)), 4):
        total += p * twisted_trace(f, 1, Delta, d // (p * p), bits)
    return total


def hecke_rhs_divisor_sum(f: ModFuncExpr | str, Delta: int, m: int, d: int, bits: int | None = None) -> Fraction:
    """sum_{n | m} (Delta/(m/n)) n t(f; d n^2), the one-line divisor-sum form."""
    return sum((kronecker(Delta, m // n) * n * twisted_trace(f, 1, Delta, d * n * n, bits)
                for n in divisors(m)), Fraction(0))


def dual_trace(f: ModFuncExpr | str, Delta: int, n: int, d: int, bits: int | None = None) -> Fraction:
    """(1/(n sqrt Delta)) sum over positive definite Q of discriminant -d Delta n^2 of chi_{-d}(Q) f(alpha_Q)/w.

    Level 1, Delta > 0 and -d fundamental.  For f = J this is the q^d
    coefficient of -g_{Delta n^2}, and the divisor sum
    sum_{n | m} (Delta/(m/n)) n dual_trace(J, Delta, n, d) equals t(J_m; d).
    """
    if isinstance(f, str):
        f = parse_modfunc(f)
    if Delta < 1 or not is_fundamental(Delta):
        raise ValueError("Delta must be a positive fundamental discriminant")
    if n < 1 or not is_fundamental(-d):
        raise ValueError("need n >= 1 and -d fundamental")
    D = -d * Delta * n * n
    reps = []
    for beta in sqrts_mod_4N(D, 1):
        reps += heegner_classes(1, D, beta).positive()
    return _recognize(f, reps, Delta, 1, bits or _default_bits(), char=-d, scale=n)[0]


def admissible_d(N: int, Delta: int, dmax: int) -> list[int]:
    return [d for d in range(1, dmax + 1)
            if is_square_mod(-sign(Delta) * d, 4 * N)]


# ---------------------------------------------------------------------------
# negative index


def trace_negative_fricke(coeffs: dict, p: int, Delta: int, m: int) -> int:
    """m sum_{n>0} (Delta/n) a(-mn): the coefficient of q^(-|Delta| m^2) for a Fricke invariant f."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    total = 0
    for n0, a in coeffs.items():
        n0 = Fraction(n0)
        if n0 >= 0 or n0.denominator != 1 or int(n0) % m:
            continue
        total += kronecker(Delta, -int(n0) // m) * a
    out = m * total
    if Fraction(out).denominator != 1:
        raise ArithmeticError("non-integral coefficient")
    return int(out)


def _mpq(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def _epsilon(Delta: int):
    return mpmath.mpc(1) if Delta > 0 else mpmath.mpc(0, 1)


def mu_ell(nu, Delta: int, N: int, k, beta, r_ell, n):
    """nu/sqrt|Delta| * conj(eps) * sum_{j mod Delta, N beta j = n' (Delta)} (Delta/j) e(2 N k r_l j/|Delta|)."""
    k, beta, r_ell, nu = Fraction(k), Fraction(beta), Fraction(r_ell), Fraction(nu)
    d = abs(Delta)
    if (2 * N * k * r_ell).denominator != 1:
        raise ValueError("2 N k r_l must be an integer for the sum over j mod Delta to be defined")
    two_k_eps = nu  # nu = 2 k eps_l
    if (two_k_eps / d).denominator != 1:
        raise ValueError("Delta must divide 2 k eps_l")
    n1 = Fraction(d) * Fraction(n) / two_k_eps
    if n1.denominator != 1:
        raise ValueError("(2 k eps_l / |Delta|) must divide n")
    Nb = N * beta
    s = mpmath.mpc(0)
    for j in range(d):
        t = Nb * j - n1
        if t.denominator != 1 or int(t) % d:
            continue
        s += kronecker(Delta, j) * mpmath.expjpi(2 * _mpq(2 * N * k * r_ell * j) / d)
    return _mpq(nu) / mpmath.sqrt(d) * mpmath.conj(_epsilon(Delta)) * s


def mu_ell_closed(nu, Delta: int, N: int, k, beta, r_ell, n):
    """Closed form of mu_ell when N beta_l is an integer coprime to Delta."""
    k, beta, r_ell, nu = Fraction(k), Fraction(beta), Fraction(r_ell), Fraction(nu)
    d = abs(Delta)
    if (2 * N * k * r_ell).denominator != 1:
        raise ValueError("2 N k r_l must be an integer for the sum over j mod Delta to be defined")
    Nb = N * beta
    if Nb.denominator != 1 or gcd(int(Nb), d) != 1:
        raise ValueError("closed form needs N beta_l coprime to Delta")
    n1 = Fraction(d) * Fraction(n) / nu
    if n1.denominator != 1:
        raise ValueError("(2 k eps_l / |Delta|) must divide n")
    n1 = int(n1)
    s_inv = pow(int(Nb), -1, d) if d > 1 else 0
    val = kronecker(Delta, int(Nb) * n1) * mpmath.expjpi(2 * _mpq(2 * N * k * r_ell * n1 * s_inv) / d)
    return _mpq(nu) / mpmath.sqrt(d) * mpmath.conj(_epsilon(Delta)) * val


def _mu_rational(nu: Fraction, Delta: int, N: int, beta: Fraction, n) -> Fraction:
    """nu * sum_{j} (Delta/j) for r_l = 0: mu_ell = this / sqrt|Delta| * conj(eps)."""
    d = abs(Delta)
    n1 = Fraction(d) * Fraction(n) / nu
    if n1.denominator != 1:
        return Fraction(0)
    Nb = N * beta
    s = 0
    for j in range(d):
        t = Nb * j - n1
        if t.denominator == 1 and int(t) % d == 0:
            s += kronecker(Delta, j)
    return nu * s


def _nonempty(cusp_label: str, hh: int, N: int, Delta: int, kp: int) -> bool:
    # diag(-k/2N, k/2N) ~ oo lies over -k, diag(k/2N, -k/2N) ~ 0 over k, with k = |Delta| k'
    k = abs(Delta) * kp
    if cusp_label == "inf":
        return (hh + k) % (2 * N) == 0
    return (hh - k) % (2 * N) == 0


def trace_negative(expansions: dict, N: int, Delta: int, r: int, h: int, kp: int) -> Fraction:
    """Normalized t_{Delta,r}(f; h, -|Delta| k'^2 / 4N) at level 1 or prime level.

    ``expansions`` maps 'inf' (and '0' for N > 1) to the principal parts
    {n: a_l(n)} with n in (1/width)Z.  The geodesics all have real part 0
    here, so every exponential factor is 1 and the result is exact.
    """
    _check_params(N, Delta, r)
    data = cusp_data(N)
    if len(data.cusps) != (1 if N == 1 else 2):
        raise ValueError("negative-index traces are implemented for N = 1 or N prime")
    k = Fraction(abs(Delta) * kp, 2 * N)
    total = Fraction(0)
    for sgn, hh in ((1, (r * h) % (2 * N)), (sign(Delta), (-r * h) % (2 * N))):
        for cusp in data.cusps:
            if not _nonempty(cusp.label, hh, N, Delta, kp):
                continue
            nu = 2 * k * cusp.eps
            step = 2 * k / (abs(Delta) * cusp.beta)
            for n, a in expansions.get(cusp.label, {}).items():
                n = Fraction(n)
                if n >= 0 or not a:
                    continue
                q = n / step
                if q.denominator != 1:
                    continue
                total += sgn * Fraction(a) * _mu_rational(nu, Delta, N, cusp.beta, n * cusp.width)
    # t = -(conj eps / sqrt|Delta|) * total, then divided by sqrt(Delta)
    return -sign(Delta) * total / abs(Delta)


def plus_space_negative(expansions: dict, N: int, Delta: int, r: int, kp: int) -> Fraction:
    """-(1/2c) sum_h t(h, -|Delta|k'^2/4N), c = number of cusps: the Kohnen plus-space principal coefficient."""
    s = sum(trace_negative(expansions, N, Delta, r, h, kp) for h in range(2 * N))
    return -s / (2 * (1 if N == 1 else 2))


def collapse_sum(N: int, Delta: int, r: int, cusp_label: str, kp: int, n: int) -> Fraction:
    """sum_h mu_l(rh, -|Delta|k'^2/4N, k' n) / sqrt|Delta| (rational since r_l = 0 and Delta > 0)."""
    cusp = cusp_data(N)[cusp_label]
    k = Fraction(abs(Delta) * kp, 2 * N)
    out = Fraction(0)
    for h in range(2 * N):
        if _nonempty(cusp.label, (r * h) % (2 * N), N, Delta, kp):
            out += _mu_rational(2 * k * cusp.eps, Delta, N, cusp.beta, kp * n)
    return out / abs(Delta)


# ---------------------------------------------------------------------------
# the lift


NOT_COMPUTED = "not computed"


@dataclass
class LiftExpansion:
    N: int
    Delta: int
    r: int
    components: dict = field(default_factory=dict)  # h -> {exponent: Fraction}
    constant_term: dict | str | None = None
    nonholomorphic: bool = False
    normalization: str = "sqrtDelta"

    def coefficient(self, h: int, m) -> Fraction:
        return self.components.get(h % (2 * self.N), {}).get(Fraction(m), Fraction(0))

    def check_support(self):
        s = sign(self.Delta)
        for h, comp in self.components.items():
            q = Fraction(-h * h, 4 * self.N)
            for m, c in comp.items():
                if c and (m - s * q).denominator != 1:
                    raise AssertionError(f"coefficient at (h={h}, m={m}) violates the index condition")

    def to_json(self) -> dict:
        def fmt(v: Fraction) -> str:
            s = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
            if self.normalization == "raw" and self.Delta != 1 and v:
                return f"{s}*sqrt({self.Delta})"
            return s
        comps = {}
        for h in sorted(self.components):
            comps[str(h)] = {str(m): fmt(c) for m, c in sorted(self.components[h].items())}
        return {"N": self.N, "Delta": self.Delta, "r": self.r, "components": comps,
                "normalization": self.normalization}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False)


def assemble_lift(f: ModFuncExpr | str, N: int, Delta: int, r: int, m_max, bits: int | None = None,
                  expansions: dict | None = None, normalization: str = "sqrtDelta") -> LiftExpansion:
    """Holomorphic-part coefficients of I_{Delta,r,h} for all h and |exponent| <= m_max."""
    if isinstance(f, str):
        f = parse_modfunc(f)
    _check_params(N, Delta, r)
    m_max = Fraction(m_max)
    if expansions is None:
        expansions = principal_parts(f, N)
    lift = LiftExpansion(N, Delta, r, {h: {} for h in range(2 * N)}, normalization=normalization)
    d_max = int(m_max * 4 * N)
    for h in range(2 * N):
        comp = lift.components[h]
        for d in range(1, d_max + 1):
            if (-d - sign(Delta) * h * h) % (4 * N):
                continue
            m = Fraction(d, 4 * N)
            tv = trace_positive(f, N, Delta, r, h, abs(Delta) * m, bits)
            if tv.value:
                comp[m] = tv.value
        kp = 1
        while Fraction(abs(Delta) * kp * kp, 4 * N) <= m_max:
            m = Fraction(-abs(Delta) * kp * kp, 4 * N)
            if (m - sign(Delta) * Fraction(-h * h, 4 * N)).denominator == 1:
                v = trace_negative(expansions, N, Delta, r, h, kp)
                if v:
                    comp[m] = v
            kp += 1
    consts = {lab: pp.get(Fraction(0), 0) for lab, pp in expansions.items()}
    if Delta == 1 and any(consts.values()):
        # the regularized integral is not implemented
        lift.constant_term = NOT_COMPUTED
    else:
        lift.constant_term = {h: Fraction(0) for h in range(2 * N)}
    data = cusp_data(N)
    lift.nonholomorphic = any(consts.get(c.label, 0) and dconst(Delta, r, c, h, N)
                              for c in data.cusps for h in range(2 * N))
    lift.check_support()
    return lift


def beta_integral(s, bits: int = 128):
    """int_1^oo t^(-3/2) e^(-s t) dt = 2 e^-s - 2 sqrt(pi s) erfc(sqrt s)."""
    with mpmath.workprec(bits + 20):
        s = mpmath.mpf(s)
        if s <= 0:
            raise ValueError("s must be positive")
        return +(2 * mpmath.exp(-s) - 2 * mpmath.sqrt(mpmath.pi * s) * mpmath.erfc(mpmath.sqrt(s)))


def beta_integral_quad(s, bits: int = 128):
    with mpmath.workprec(bits + 20):
        s = mpmath.mpf(s)
        return mpmath.quad(lambda t: t ** mpmath.mpf(-1.5) * mpmath.exp(-s * t), [1, 2, 10, mpmath.inf])


def squarefree_dconst_vanishes(N: int, Delta: int, r: int) -> bool:
    if not is_squarefree(N):
        raise ValueError("N must be squarefree")
    return all(dconst(Delta, r, c, h, N) == 0 for c in cusp_data(N).cusps for h in range(2 * N))

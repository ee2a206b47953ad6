"""
Weak Jacobi forms of even weight: the generators a (weight -2) and b
(weight 0) of index 1, products, a principal-part solver over
C[E4, E6, 1/Delta], and coefficient extraction c(D), D = 4Nn - r^2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .qseries import FormalSeries, ZetaPolynomial, delta_qexp, eisenstein_qexp, euler_product


class JacobiError(ArithmeticError):
    pass


@dataclass
class JacobiSeries:
    """sum_{n < order} c(n, r) q^n zeta^r stored as a q-series of zeta polynomials."""

    weight: int
    index: int
    series: FormalSeries
    kernel_dimension: int = 0

    @property
    def order(self) -> int:
        return self.series.order

    def __add__(self, other: "JacobiSeries") -> "JacobiSeries":
        _compatible(self, other)
        return JacobiSeries(self.weight, self.index, self.series + other.series)

    def __sub__(self, other: "JacobiSeries") -> "JacobiSeries":
        _compatible(self, other)
        return JacobiSeries(self.weight, self.index, self.series - other.series)

    def __neg__(self):
        return JacobiSeries(self.weight, self.index, -self.series)

    def scale(self, c) -> "JacobiSeries":
        return JacobiSeries(self.weight, self.index, self.series.scale(c))

    def times_modular(self, f: FormalSeries, weight: int) -> "JacobiSeries":
        return JacobiSeries(self.weight + weight, self.index, self.series * f)

    def truncate(self, order: int) -> "JacobiSeries":
        return JacobiSeries(self.weight, self.index, self.series.truncate(order))

    def coefficient(self, n: int, r: int):
        if n >= self.order:
            raise IndexError(f"q^{n} is beyond the truncation order {self.order}")
        zp = self.series[n]
        return zp[r] if isinstance(zp, ZetaPolynomial) else (zp if r == 0 else 0)

    def terms(self):
        for n, zp in self.series.items():
            if isinstance(zp, ZetaPolynomial):
                for r, c in sorted(zp.terms().items()):
                    yield n, r, c
            else:
                yield n, 0, zp

    def to_json(self) -> dict:
        return {"weight": self.weight, "index": self.index, "order": self.order,
                "terms": [{"n": n, "r": r, "c": str(c)} for n, r, c in self.terms()]}

    @classmethod
    def from_json(cls, data) -> "JacobiSeries":
        if isinstance(data, str):
            data = json.loads(data)
        rows: dict[int, dict[int, Fraction]] = {}
        for t in data["terms"]:
            rows.setdefault(int(t["n"]), {})[int(t["r"])] = Fraction(t["c"])
        order = int(data["order"])
        series = FormalSeries.from_dict({n: ZetaPolynomial(rz) for n, rz in rows.items()}, order)
        return cls(int(data["weight"]), int(data["index"]), series)

    def __eq__(self, other):
        if not isinstance(other, JacobiSeries):
            return NotImplemented
        return (self.weight, self.index, self.order) == (other.weight, other.index, other.order) and \
            list(self.terms()) == list(other.terms())


def _compatible(x, y):
    if (x.weight, x.index) != (y.weight, y.index):
        raise ValueError("weight and index must agree")


def jacobi_mul(x: JacobiSeries, y: JacobiSeries) -> JacobiSeries:
    return JacobiSeries(x.weight + y.weight, x.index + y.index, x.series * y.series)


def jacobi_one(order: int) -> JacobiSeries:
    return JacobiSeries(0, 0, FormalSeries(0, [ZetaPolynomial.constant(1)], order))


# ---------------------------------------------------------------------------
# generators


@lru_cache(maxsize=None)
def _theta_quotient(order: int) -> FormalSeries:
    """prod (1 - q^n zeta)^2 (1 - q^n zeta^-1)^2 / (1 - q^n)^4."""
    out = FormalSeries(0, [ZetaPolynomial.constant(1)], order)
    for n in range(1, order):
        # (1 - q^n zeta)(1 - q^n / zeta) = 1 - (zeta + 1/zeta) q^n + q^2n
        f = FormalSeries.from_dict({0: ZetaPolynomial.constant(1), n: ZetaPolynomial({1: -1, -1: -1}),
                                    2 * n: ZetaPolynomial.constant(1)}, order)
        out = out * f * f
    inv = euler_product(order).inverse()
    inv4 = inv ** 4
    return out * inv4


@lru_cache(maxsize=None)
def _gen_a(order: int) -> JacobiSeries:
    pref = ZetaPolynomial({-1: 1, 0: -2, 1: 1})
    return JacobiSeries(-2, 1, _theta_quotient(order).scale(pref))


def gen_a(order: int) -> JacobiSeries:
    """phi_{-2,1} = (zeta - 2 + zeta^-1) + (-2 zeta^-2 + 8 zeta^-1 - 12 + 8 zeta - 2 zeta^2) q + ..."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return _gen_a(order)


@lru_cache(maxsize=None)
def _gen_b(order: int) -> JacobiSeries:
    # b = 12 a * (1/12 + zeta/(1-zeta)^2 + sum_n sum_{d|n} d (zeta^d - 2 + zeta^-d) q^n)
    a = _gen_a(order)
    p = _theta_quotient(order)
    wp = {n: ZetaPolynomial(_wp_terms(n)) for n in range(1, order)}
    s = FormalSeries.from_dict(wp, order) if wp else FormalSeries.zero(order)
    series = a.series + p.scale(12) + (a.series * s).scale(12)
    return JacobiSeries(0, 1, series)


def _wp_terms(n: int) -> dict:
    out: dict[int, int] = {}
    for d in range(1, n + 1):
        if n % d:
            continue
        out[d] = out.get(d, 0) + d
        out[-d] = out.get(-d, 0) + d
        out[0] = out.get(0, 0) - 2 * d
    return out


def gen_b(order: int) -> JacobiSeries:
    """phi_{0,1} = (zeta + 10 + zeta^-1) + (10 zeta^-2 - 64 zeta^-1 + 108 - 64 zeta + 10 zeta^2) q + ..."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return _gen_b(order)


# ---------------------------------------------------------------------------
# modular forms of level one


def modular_basis(weight: int, pole: int, order: int) -> list[tuple[tuple[int, int, int], FormalSeries]]:
    """E4^i E6^j Delta^-pole spanning the weakly holomorphic forms of this weight with valuation >= -pole."""
    k = weight + 12 * pole
    out = []
    if k < 0 or k % 2:
        return out
    n = order + pole + 1
    e4, e6 = eisenstein_qexp(4, n), eisenstein_qexp(6, n)
    dinv = delta_qexp(n + 1).inverse() ** pole if pole else FormalSeries.one(n)
    for j in range(k // 6 + 1):
        rest = k - 6 * j
        if rest % 4:
            continue
        i = rest // 4
        s = (e4 ** i) * (e6 ** j) if (i or j) else FormalSeries.one(n)
        s = s * dinv
        out.append(((i, j, pole), s.truncate(order) if s.order > order else s))
    return out


# ---------------------------------------------------------------------------
# solver


def _rep(D: int, N: int) -> tuple[int, int] | None:
    """(n, r) with 4Nn - r^2 = D and 0 <= r <= N, or None."""
    for r in range(N + 1):
        if (D + r * r) % (4 * N) == 0:
            return (D + r * r) // (4 * N), r
    return None


def solve_principal_part(weight: int, index: int, targets: dict, order: int) -> JacobiSeries:
    """The weak Jacobi form sum_j f_j a^j b^(N-j) whose coefficients of negative
    discriminant are exactly ``targets`` (D -> c(D)), known through q^(order-1).

    The solution is exact.  If the constraints do not pin it down, the returned
    form carries the kernel dimension; infeasible constraints raise JacobiError.
    """
    N = index
    if weight % 2:
        raise ValueError("only even weights are supported")
    targets = {int(D): Fraction(c) for D, c in targets.items() if c}
    for D in targets:
        if D >= 0:
            raise ValueError("targets must have negative discriminant")
        if _rep(D, N) is None:
            raise JacobiError(f"{D} is not a discriminant of index {N}")
    pole = max([0] + [-_rep(D, N)[0] for D in targets])
    D_min = -4 * N * pole - N * N
    constraints = [(D, _rep(D, N)) for D in range(D_min, 0) if _rep(D, N) is not None]
    constraints = [(D, nr) for D, nr in constraints if nr[0] >= -pole]
    # every constraint must lie inside the computed range
    order = max([order] + [nr[0] + 1 for _, nr in constraints])
    big = order + pole
    a, b = gen_a(big), gen_b(big)
    columns = []
    labels = []
    apow = [jacobi_one(big)]
    bpow = [jacobi_one(big)]
    for _ in range(N):
        apow.append(jacobi_mul(apow[-1], a))
        bpow.append(jacobi_mul(bpow[-1], b))
    for j in range(N + 1):
        P = jacobi_mul(apow[j], bpow[N - j])
        for key, g in modular_basis(weight + 2 * j, pole, order):
            col = P.times_modular(g, weight + 2 * j)
            columns.append(col.truncate(order) if col.order > order else col)
            labels.append((j,) + key)
    if not columns:
        raise JacobiError("no basis forms in this weight")
    rows = [[Fraction(c.coefficient(*nr)) for c in columns] for _, nr in constraints]
    rhs = [targets.get(D, Fraction(0)) for D, _ in constraints]
    x, nullity = _solve_exact(rows, rhs)
    result = None
    for coef, col in zip(x, columns):
        if coef:
            result = col.scale(coef) if result is None else result + col.scale(coef)
    if result is None:
        result = JacobiSeries(weight, N, FormalSeries.zero(order))
    result.kernel_dimension = nullity
    result.weight, result.index = weight, N
    return result


def _solve_exact(rows, rhs):
    m = len(rows)
    n = len(rows[0]) if rows else 0
    aug = DomainMatrix([[QQ(v.numerator, v.denominator) for v in row] + [QQ(t.numerator, t.denominator)]
                        for row, t in zip(rows, rhs)], (m, n + 1), QQ)
    R, pivots = aug.rref()
    if n in pivots:
        raise JacobiError("principal part constraints are infeasible at this order")
    x = [Fraction(0)] * n
    Rl = R.to_list()
    for i, p in enumerate(pivots):
        v = Rl[i][n]
        x[p] = Fraction(int(v.numerator), int(v.denominator))
    return x, n - len(pivots)


# ---------------------------------------------------------------------------
# coefficients


def jacobi_coeff(phi: JacobiSeries, n: int, r: int) -> Fraction:
    return Fraction(phi.coefficient(n, r))


def plus_space_series(phi: JacobiSeries, D_max: int) -> dict[int, Fraction]:
    """D -> c(D) for all D <= D_max seen in phi, checking single-valuedness."""
    N = phi.index
    out: dict[int, Fraction] = {}
    for n, r, c in phi.terms():
        D = 4 * N * n - r * r
        if D > D_max:
            continue
        c = Fraction(c)
        if D in out and out[D] != c:
            raise JacobiError(f"c({D}) is not single valued: {out[D]} vs {c} at (n={n}, r={r})")
        out[D] = c
    # coefficients known to vanish: any D <= D_max with a representative inside the window
    for D in range(-4 * N * (-phi.series.valuation if phi.series.coeffs else 0) - N * N, D_max + 1):
        rep = _rep(D, N)
        if rep is not None and rep[0] < phi.order and rep[0] >= phi.series.valuation:
            out.setdefault(D, Fraction(0))
    return dict(sorted(out.items()))


def check_discriminant_dependence(phi: JacobiSeries) -> bool:
    N = phi.index
    seen: dict[tuple[int, int], Fraction] = {}
    for n, r, c in phi.terms():
        key = (4 * N * n - r * r, min(r % (2 * N), (-r) % (2 * N)))
        if key in seen and seen[key] != c:
            return False
        seen[key] = Fraction(c)
    # every (n, r) inside the window must agree, including zeros
    for n in range(phi.series.valuation, phi.order):
        zp = phi.series[n]
        for r in range(-N - 2 * N * 4, N + 2 * N * 4 + 1):
            key = (4 * N * n - r * r, min(r % (2 * N), (-r) % (2 * N)))
            c = Fraction(zp[r] if isinstance(zp, ZetaPolynomial) else (zp if r == 0 else 0))
            if key in seen and seen[key] != c:
                n0 = (key[0] + key[1] ** 2) // (4 * N)
                if n0 < phi.order:
                    return False
    return True


def check_symmetry(phi: JacobiSeries) -> bool:
    return all(Fraction(phi.coefficient(n, -r)) == Fraction(c) for n, r, c in phi.terms())


# ---------------------------------------------------------------------------
# the forms attached to twisted traces


def lift_targets(expansions: dict, N: int, Delta: int, r: int) -> dict[int, Fraction]:
    """Negative-discriminant coefficients of -1/2 phi_Delta^(N) from the negative-index traces."""
    from .traces import cusp_data, trace_negative

    data = cusp_data(N)
    # a_l(n) only reaches k' <= |n| N beta_l
    kmax = 0
    for cusp in data.cusps:
        for n, a in expansions.get(cusp.label, {}).items():
            if a and n < 0:
                kmax = max(kmax, int(-Fraction(n) * N * cusp.beta))
    out = {}
    for kp in range(1, kmax + 1):
        D = -abs(Delta) * kp * kp
        for h in range(2 * N):
            if (D + h * h) % (4 * N) == 0:
                v = trace_negative(expansions, N, Delta, r, h, kp)
                if v:
                    out[D] = -v / 2
                break
    return out


def twisted_lift_jacobi(expansions: dict, N: int, Delta: int, r: int, order: int) -> JacobiSeries:
    """-1/2 phi_Delta^(N): weight 2, index N, principal part from the negative-index traces."""
    return solve_principal_part(2, N, lift_targets(expansions, N, Delta, r), order)


def zagier_g(Delta: int, order: int) -> JacobiSeries:
    """Index-1 weight-2 form with principal part c(-Delta) = 1 (Zagier's g_Delta via Eichler-Zagier)."""
    return solve_principal_part(2, 1, {-Delta: 1}, order)

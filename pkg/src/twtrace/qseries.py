"""
Exact truncated Laurent series in q, Laurent polynomials in zeta, and the
classical level-one q-expansions (eta, E4, E6, Delta, j, Faber polynomials).

Coefficients are Python ints or ``fractions.Fraction``; a Fraction with
denominator 1 is always stored as an int so that the integer kernels apply.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from ._accel import convolve, convolve_trunc


def _norm(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, int):
        return x
    if isinstance(x, Rational):
        return _norm(Fraction(x))
    raise TypeError(f"non-rational coefficient {x!r}")


def _parse_coeff(s: str):
    return _norm(Fraction(s))


class ZetaPolynomial:
    """Laurent polynomial in zeta with exact rational coefficients.

    Stored as (lowest exponent, dense coefficient list) with both ends nonzero.
    """

    __slots__ = ("low", "coeffs")

    def __init__(self, terms=None, *, low: int = 0, coeffs: list | None = None):
        if terms is not None:
            if not terms:
                low, coeffs = 0, []
            else:
                lo, hi = min(terms), max(terms)
                coeffs = [0] * (hi - lo + 1)
                for e, c in terms.items():
                    coeffs[e - lo] = _norm(c)
                low = lo
        coeffs = list(coeffs or [])
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        start = 0
        while start < len(coeffs) and not coeffs[start]:
            start += 1
        self.low = low + start if coeffs else 0
        self.coeffs = coeffs[start:]

    @classmethod
    def constant(cls, c) -> "ZetaPolynomial":
        return cls(low=0, coeffs=[_norm(c)])

    @property
    def high(self) -> int:
        return self.low + len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, r: int):
        i = r - self.low
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def terms(self) -> dict:
        return {self.low + i: c for i, c in enumerate(self.coeffs) if c}

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ZetaPolynomial.constant(other)
        if not isinstance(other, ZetaPolynomial):
            return NotImplemented
        return self.low == other.low and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.low, tuple(self.coeffs)))

    def _coerce(self, other):
        if isinstance(other, ZetaPolynomial):
            return other
        return ZetaPolynomial.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        if not other:
            return self
        if not self:
            return other
        lo = min(self.low, other.low)
        hi = max(self.high, other.high)
        out = [0] * (hi - lo + 1)
        for i, c in enumerate(self.coeffs):
            out[self.low - lo + i] += c
        for i, c in enumerate(other.coeffs):
            out[other.low - lo + i] += c
        return ZetaPolynomial(low=lo, coeffs=[_norm(c) for c in out])

    __radd__ = __add__

    def __neg__(self):
        return ZetaPolynomial(low=self.low, coeffs=[-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, ZetaPolynomial):
            if not self or not other:
                return ZetaPolynomial()
            return ZetaPolynomial(low=self.low + other.low,
                                  coeffs=[_norm(c) for c in convolve(self.coeffs, other.coeffs)])
        c = _norm(other)
        if not c:
            return ZetaPolynomial()
        return ZetaPolynomial(low=self.low, coeffs=[_norm(x * c) for x in self.coeffs])

    __rmul__ = __mul__

    def __repr__(self):
        if not self:
            return "0"
        parts = []
        for e, c in self.terms().items():
            parts.append(f"{c}" if e == 0 else f"{c}*z^{e}")
        return " + ".join(parts)


class FormalSeries:
    """Truncated Laurent series  sum_{valuation <= n < order} c_n q^n.

    Coefficients may be rationals or ZetaPolynomials. The series is known
    exactly up to (excluding) ``order``; arithmetic propagates the smallest
    order that is justified by the operands.
    """

    __slots__ = ("valuation", "coeffs", "order")

    def __init__(self, valuation: int, coeffs, order: int | None = None):
        coeffs = list(coeffs)
        if order is None:
            order = valuation + len(coeffs)
        coeffs = coeffs[: max(order - valuation, 0)]
        coeffs += [0] * (order - valuation - len(coeffs))
        start = 0
        while start < len(coeffs) and not coeffs[start]:
            start += 1
        if start == len(coeffs):
            self.valuation, self.coeffs = order, []
        else:
            self.valuation = valuation + start
            self.coeffs = [c if isinstance(c, ZetaPolynomial) else _norm(c) for c in coeffs[start:]]
        self.order = order

    @classmethod
    def from_dict(cls, terms: dict, order: int) -> "FormalSeries":
        if not terms:
            return cls(order, [], order)
        v = min(terms)
        out = [0] * (order - v)
        for n, c in terms.items():
            if n < order:
                out[n - v] = c
        return cls(v, out, order)

    @classmethod
    def zero(cls, order: int) -> "FormalSeries":
        return cls(order, [], order)

    @classmethod
    def one(cls, order: int) -> "FormalSeries":
        return cls(0, [1], order)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, n: int):
        if n >= self.order:
            raise IndexError(f"coefficient q^{n} beyond truncation order {self.order}")
        i = n - self.valuation
        return self.coeffs[i] if i >= 0 else 0

    def items(self):
        for i, c in enumerate(self.coeffs):
            if c:
                yield self.valuation + i, c

    def principal_part(self) -> dict:
        return {n: c for n, c in self.items() if n < 0}

    def truncate(self, order: int) -> "FormalSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return FormalSeries(self.valuation, self.coeffs, order)

    def __eq__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return (self.order == other.order and self.valuation == other.valuation
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.valuation, self.order, len(self.coeffs)))

    def _dense(self, lo: int, hi: int) -> list:
        out = [0] * (hi - lo)
        for i, c in enumerate(self.coeffs):
            n = self.valuation + i
            if lo <= n < hi:
                out[n - lo] = c
        return out

    def __add__(self, other):
        if not isinstance(other, FormalSeries):
            other = FormalSeries(0, [other], self.order)
        order = min(self.order, other.order)
        lo = min(self.valuation, other.valuation, order)
        a, b = self._dense(lo, order), other._dense(lo, order)
        return self.__class__._wrap(self, FormalSeries(lo, [x + y for x, y in zip(a, b)], order))

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(self, FormalSeries(self.valuation, [-c for c in self.coeffs], self.order))

    def __sub__(self, other):
        if not isinstance(other, FormalSeries):
            other = FormalSeries(0, [other], self.order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "FormalSeries":
        return self._wrap(self, FormalSeries(self.valuation, [x * c for x in self.coeffs], self.order))

    def shift(self, k: int) -> "FormalSeries":
        """Multiply by q^k."""
        return self._wrap(self, FormalSeries(self.valuation + k, self.coeffs, self.order + k))

    def __mul__(self, other):
        if not isinstance(other, FormalSeries):
            return self.scale(other)
        order = min(self.order + other.valuation, other.order + self.valuation)
        v = self.valuation + other.valuation
        n = order - v
        if n <= 0 or not self.coeffs or not other.coeffs:
            return self._wrap(self, FormalSeries.zero(order))
        a, b = self.coeffs[:n], other.coeffs[:n]
        if all(isinstance(x, int) for x in a) and all(isinstance(x, int) for x in b):
            prod = convolve_trunc(a, b, n)
        else:
            prod = _generic_convolve(a, b, n)
        return self._wrap(self, FormalSeries(v, prod, order))

    __rmul__ = __mul__

    def inverse(self) -> "FormalSeries":
        if not self.coeffs:
            raise ZeroDivisionError("series is zero to working order")
        v = self.valuation
        n = self.order - v
        lead = Fraction(self.coeffs[0])
        inv = [Fraction(1) / lead]
        for k in range(1, n):
            s = sum(self.coeffs[i] * inv[k - i] for i in range(1, min(k, len(self.coeffs) - 1) + 1))
            inv.append(-s / lead)
        return FormalSeries(-v, inv, -v + n)

    def __truediv__(self, other):
        if isinstance(other, FormalSeries):
            return self * other.inverse()
        return self.scale(Fraction(1) / Fraction(other))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = FormalSeries.one(self.order - self.valuation) if e == 0 else None
        base, out = self, None
        while e:
            if e & 1:
                out = base if out is None else out * base
            e >>= 1
            if e:
                base = base * base
        return out if out is not None else result

    @staticmethod
    def _wrap(template, series):
        return series

    def __repr__(self):
        shown = ", ".join(f"{c}q^{n}" for n, c in list(self.items())[:6])
        return f"FormalSeries({shown}, O(q^{self.order}))"

    # serialization -------------------------------------------------------
    def to_json(self) -> dict:
        return {"valuation": self.valuation, "order": self.order,
                "coefficients": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data) -> "FormalSeries":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["valuation"], [_parse_coeff(c) for c in data["coefficients"]], data["order"])


def _generic_convolve(a, b, n):
    out = [0] * n
    for i, x in enumerate(a):
        if not x:
            continue
        for j in range(min(len(b), n - i)):
            y = b[j]
            if y:
                out[i + j] = out[i + j] + x * y
    return out


# ---------------------------------------------------------------------------
# classical expansions


def sigma(n: int, k: int) -> int:
    s = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            s += d ** k
            if d * d != n:
                s += (n // d) ** k
        d += 1
    return s


@lru_cache(maxsize=None)
def _euler_product(order: int) -> tuple:
    """Coefficients of prod_{n>=1} (1 - q^n) modulo q^order."""
    c = [0] * order
    if order:
        c[0] = 1
    for n in range(1, order):
        for i in range(order - 1, n - 1, -1):
            c[i] -= c[i - n]
    return tuple(c)


def euler_product(order: int) -> FormalSeries:
    return FormalSeries(0, list(_euler_product(order)), order)


def eta_qexp(order: int, power: int = 1) -> FormalSeries:
    """q^{-power/24} eta^power, i.e. prod (1-q^n)^power, modulo q^order.

    The fractional prefactor q^{power/24} is left to the caller.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    return euler_product(order) ** power if power >= 0 else euler_product(order) ** power


@lru_cache(maxsize=None)
def _delta_coeffs(order: int) -> tuple:
    s = euler_product(order) ** 24
    return tuple(s._dense(0, order))


def delta_qexp(order: int) -> FormalSeries:
    """The discriminant q prod (1-q^n)^24, known through q^{order-1}."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return FormalSeries(1, list(_delta_coeffs(order - 1 if order > 1 else 1))[: order - 1], order)


@lru_cache(maxsize=None)
def _eisenstein(k: int, order: int) -> tuple:
    const = {4: 240, 6: -504}[k]
    return tuple([1] + [const * sigma(n, k - 1) for n in range(1, order)])


def eisenstein_qexp(k: int, order: int) -> FormalSeries:
    """Normalized Eisenstein series E_k (k = 4 or 6) modulo q^order."""
    if k not in (4, 6):
        raise ValueError(f"unsupported weight {k}")
    return FormalSeries(0, list(_eisenstein(k, order)), order)


@lru_cache(maxsize=None)
def _j_coeffs(order: int) -> tuple:
    # j = E4^3 / Delta, valuation -1, known through q^{order-1}
    n = order + 1
    e4 = eisenstein_qexp(4, n)
    d = FormalSeries(0, list(_delta_coeffs(n)), n)  # Delta / q
    jq = (e4 ** 3) / d
    out = jq._dense(0, n)
    if any(isinstance(c, Fraction) for c in out):
        raise ArithmeticError("non-integral j coefficient")
    return tuple(out)


def j_qexp(order: int) -> FormalSeries:
    """j = q^-1 + 744 + 196884 q + ... modulo q^order."""
    if order < 0:
        raise ValueError("order must be >= 0")
    return FormalSeries(-1, list(_j_coeffs(max(order, 1)))[: order + 1], order)


def J_qexp(order: int) -> FormalSeries:
    return j_qexp(order) - 744 if order > 0 else j_qexp(order)


@lru_cache(maxsize=None)
def _faber(m: int, order: int) -> tuple:
    J = J_qexp(order + m)
    # reduce J^m by lower powers until the principal part is q^-m
    out = J ** m
    out = out.truncate(order) if out.order > order else out
    for k in range(m - 1, 0, -1):
        c = out[-k]
        if c:
            out = out - (J_qexp(order + k) ** k).truncate(order).scale(c)
    c0 = out[0] if order > 0 else 0
    if c0:
        out = out - c0
    return out.valuation, tuple(out.coeffs), out.order


def faber_Jm(m: int, order: int) -> FormalSeries:
    """J_m: the level-one modular function with principal part q^-m and zero constant term."""
    if m < 1:
        raise ValueError("m must be positive")
    v, c, o = _faber(m, order)
    return FormalSeries(v, list(c), o)


@lru_cache(maxsize=None)
def faber_polynomial(m: int) -> tuple:
    """Integer coefficients (c_0, ..., c_m) with J_m = sum c_i j^i."""
    order = 2
    jj = j_qexp(order + m)
    target = faber_Jm(m, order)
    coeffs = [0] * (m + 1)
    rem = target
    for k in range(m, -1, -1):
        c = rem[-k] if k else rem[0]
        coeffs[k] = c
        if c:
            rem = rem - ((jj ** k).truncate(order) if k else FormalSeries.one(order)).scale(c)
    if not rem.is_zero():
        raise ArithmeticError("Faber polynomial reconstruction failed")
    return tuple(coeffs)

"""
Parsing and certified evaluation of weakly holomorphic modular functions
built from j, J, J_m, eta, E4 and E6 at rescaled arguments.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | base ('^' '-'? int)?
    base   := atom | int | '(' expr ')'
    atom   := ('j'|'J'|'E4'|'E6'|'eta'|'J' int) '(' int? 'z' ')'

Every atom is evaluated at k*tau after exact reduction of k*tau into the
standard fundamental domain; the q-expansion is summed until an explicit
tail bound is below target.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .qforms import CMPoint, reduce_point
from .qseries import _euler_product, _j_coeffs, eisenstein_qexp, faber_polynomial

# ---------------------------------------------------------------------------
# expression trees


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


@dataclass(frozen=True)
class Atom:
    name: str  # 'j', 'J', 'Jm', 'E4', 'E6', 'eta'
    scale: int = 1
    m: int = 1

    def render(self) -> str:
        head = f"J{self.m}" if self.name == "Jm" else self.name
        arg = "z" if self.scale == 1 else f"{self.scale}z"
        return f"{head}({arg})"


@dataclass(frozen=True)
class Const:
    value: Fraction

    def render(self) -> str:
        v = self.value
        s = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        return f"({s})" if v < 0 or v.denominator != 1 else s


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def render(self) -> str:
        return f"({self.left.render()} {self.op} {self.right.render()})"


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int

    def render(self) -> str:
        return f"{self.base.render()}^{self.exp}"


@dataclass(frozen=True)
class Neg:
    arg: object

    def render(self) -> str:
        return f"(-{self.arg.render()})"


ModFuncExpr = Atom | Const | BinOp | Pow | Neg

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>E4|E6|eta|J\d+|J|j)|(?P<z>z)|(?P<op>[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if kind and tok[0] != kind or value and tok[1] != value:
            want = value or kind
            raise ParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op, _, pos = self.take()[1], None, self.peek()[2]
            rhs = self.factor()
            if op == "/" and isinstance(rhs, Const) and rhs.value == 0:
                raise ParseError("division by zero literal", pos)
            node = BinOp(op, node, rhs)
        return node

    def factor(self):
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            return Neg(self.factor())
        node = self.base()
        if self.peek()[1] == "^":
            self.take()
            neg = False
            if self.peek()[1] == "-":
                self.take()
                neg = True
            e = int(self.take("num")[1])
            node = Pow(node, -e if neg else e)
        return node

    def base(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return Const(Fraction(int(val)))
        if kind == "op" and val == "(":
            self.take()
            node = self.expr()
            self.take("op", ")")
            return node
        if kind == "name":
            self.take()
            self.take("op", "(")
            scale = 1
            if self.peek()[0] == "num":
                scale = int(self.take()[1])
                if scale < 1:
                    raise ParseError("scale must be positive", pos)
            self.take("z")
            self.take("op", ")")
            if val.startswith("J") and len(val) > 1:
                m = int(val[1:])
                if m < 1:
                    raise ParseError("J_m needs m >= 1", pos)
                return Atom("Jm", scale, m)
            return Atom(val, scale)
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unknown atom or token {val!r}", pos)


def parse_modfunc(text: str) -> ModFuncExpr:
    p = _Parser(text)
    node = p.expr()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected token {val!r}", pos)
    return node


def render(node: ModFuncExpr) -> str:
    return node.render()


def atoms(node) -> list[Atom]:
    if isinstance(node, Atom):
        return [node]
    if isinstance(node, BinOp):
        return atoms(node.left) + atoms(node.right)
    if isinstance(node, (Pow,)):
        return atoms(node.base)
    if isinstance(node, Neg):
        return atoms(node.arg)
    return []


def weight(node) -> int:
    """Weight of a homogeneous expression (ValueError if not homogeneous)."""
    if isinstance(node, Atom):
        return {"E4": 4, "E6": 6}.get(node.name, 0) if node.name != "eta" else Fraction(1, 2)
    if isinstance(node, Const):
        return 0
    if isinstance(node, Neg):
        return weight(node.arg)
    if isinstance(node, Pow):
        return weight(node.base) * node.exp
    wl, wr = weight(node.left), weight(node.right)
    if node.op in "+-":
        if wl != wr:
            raise ValueError("inhomogeneous sum")
        return wl
    return wl + wr if node.op == "*" else wl - wr


# ---------------------------------------------------------------------------
# certified complex numbers


class PrecisionError(ArithmeticError):
    """The requested accuracy cannot be certified."""


@dataclass
class CertifiedComplex:
    value: mpmath.mpc
    error_bound: mpmath.mpf

    @classmethod
    def exact(cls, x) -> "CertifiedComplex":
        return cls(mpmath.mpc(x), mpmath.mpf(0))

    def _round(self, v):
        # one rounding of v at the current working precision
        return abs(v) * mpmath.ldexp(1, 2 - mpmath.mp.prec)

    def __add__(self, other):
        if not isinstance(other, CertifiedComplex):
            other = CertifiedComplex.exact(other)
        v = self.value + other.value
        return CertifiedComplex(v, self.error_bound + other.error_bound + self._round(v))

    __radd__ = __add__

    def __neg__(self):
        return CertifiedComplex(-self.value, self.error_bound)

    def __sub__(self, other):
        if not isinstance(other, CertifiedComplex):
            other = CertifiedComplex.exact(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CertifiedComplex):
            other = CertifiedComplex.exact(other)
        v = self.value * other.value
        e = (abs(self.value) * other.error_bound + abs(other.value) * self.error_bound
             + self.error_bound * other.error_bound)
        return CertifiedComplex(v, e + self._round(v))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, CertifiedComplex):
            other = CertifiedComplex.exact(other)
        b = abs(other.value)
        if b <= other.error_bound:
            raise PrecisionError("divisor not certified to be nonzero")
        v = self.value / other.value
        e = (self.error_bound * b + abs(self.value) * other.error_bound) / (b * (b - other.error_bound))
        return CertifiedComplex(v, e + self._round(v))

    def __pow__(self, n: int):
        if n < 0:
            return CertifiedComplex.exact(1) / (self ** (-n))
        out = CertifiedComplex.exact(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def conjugate(self) -> "CertifiedComplex":
        return CertifiedComplex(mpmath.conj(self.value), self.error_bound)

    def __repr__(self):
        return f"CertifiedComplex({mpmath.nstr(self.value, 25)} +- {mpmath.nstr(self.error_bound, 3)})"


def recognize_integer(x: CertifiedComplex) -> int:
    """Nearest integer to x, refusing whenever the bound does not isolate it."""
    if not isinstance(x, CertifiedComplex):
        x = CertifiedComplex.exact(x)
    eb = x.error_bound
    if eb >= 0.25:
        raise PrecisionError(f"error bound {mpmath.nstr(eb, 3)} too large to round")
    if abs(x.value.imag) > eb:
        raise PrecisionError("imaginary part not certified zero")
    n = int(mpmath.nint(x.value.real))
    if abs(x.value.real - n) > eb:
        raise PrecisionError(f"{mpmath.nstr(x.value.real, 20)} is not within {mpmath.nstr(eb, 3)} of an integer")
    return n


def minimal_polynomial(values: list[CertifiedComplex]) -> list[int]:
    """Integer coefficients (highest degree first) of prod (x - v_i)."""
    coeffs = [CertifiedComplex.exact(1)]
    for v in values:
        new = coeffs + [CertifiedComplex.exact(0)]
        for i in range(1, len(new)):
            new[i] = new[i] - v * coeffs[i - 1]
        coeffs = new
    return [recognize_integer(c) for c in coeffs]


# ---------------------------------------------------------------------------
# atom evaluation

# |q| <= exp(-pi sqrt 3) in the standard fundamental domain
_Q_MAX = math.exp(-math.pi * math.sqrt(3))
MAX_ORDER = 2000


def coefficient_envelope(n: int) -> float:
    """Upper bound for |c(n)|, n >= 1, of j: exp(4 pi sqrt n)."""
    return math.exp(4 * math.pi * math.sqrt(n))


def _j_tail_bound(M: int, absq: float) -> float:
    """Bound for sum_{n >= M} exp(4 pi sqrt n) |q|^n, valid when the ratio is < 1."""
    ratio = math.exp(2 * math.pi / math.sqrt(M)) * absq
    if ratio >= 1:
        return math.inf
    return math.exp(4 * math.pi * math.sqrt(M) + M * math.log(absq)) / (1 - ratio)


def _poly_tail_bound(M: int, absq: float, C: float, k: int) -> float:
    """Bound for sum_{n >= M} C n^k |q|^n."""
    ratio = ((M + 1) / M) ** k * absq
    if ratio >= 1:
        return math.inf
    return C * M ** k * absq ** M / (1 - ratio)


def _choose_order(tail, absq: float, target_log2: float) -> int:
    M = 4
    while M < MAX_ORDER:
        t = tail(M, absq)
        if t == 0 or (t < math.inf and math.log2(t) < target_log2):
            return M
        M += max(1, M // 4)
    raise PrecisionError("precision target unreachable within the configured maximum order")


def _series_value(coeffs, q, start: int):
    """sum_i coeffs[i] q^(start+i), with a certified rounding bound."""
    s = mpmath.mpc(0)
    absum = mpmath.mpf(0)
    qp = q ** start
    for c in coeffs:
        if c:
            t = c * qp
            s += t
            absum += abs(t)
        qp *= q
    rounding = absum * (len(coeffs) + 4) * mpmath.ldexp(1, 3 - mpmath.mp.prec)
    return s, rounding


def _j_at_reduced(w: CMPoint, target_log2: float) -> CertifiedComplex:
    q = mpmath.expjpi(2 * w.to_mpc())
    absq = float(abs(q))
    M = _choose_order(_j_tail_bound, absq, target_log2)
    coeffs = _j_coeffs(M)  # q^-1 ... q^(M-1)
    v, rnd = _series_value(coeffs, q, -1)
    return CertifiedComplex(v, rnd + mpmath.mpf(_j_tail_bound(M, absq)))


def _eis_at_reduced(k: int, w: CMPoint, target_log2: float) -> CertifiedComplex:
    q = mpmath.expjpi(2 * w.to_mpc())
    absq = float(abs(q))
    C = 240 * 1.21 if k == 4 else 504 * 1.04  # times zeta(k-1)
    tail = lambda M, a: _poly_tail_bound(M, a, C, k - 1)  # noqa: E731
    M = _choose_order(tail, absq, target_log2)
    coeffs = eisenstein_qexp(k, M)._dense(0, M)
    v, rnd = _series_value(coeffs, q, 0)
    return CertifiedComplex(v, rnd + mpmath.mpf(tail(M, absq)))


def _eta_at_reduced(w: CMPoint, target_log2: float) -> CertifiedComplex:
    # prod (1 - q^n) = sum over pentagonal numbers; coefficients are 0, +-1
    q = mpmath.expjpi(2 * w.to_mpc())
    absq = float(abs(q))
    tail = lambda M, a: a ** M / (1 - a)  # noqa: E731
    M = _choose_order(tail, absq, target_log2)
    coeffs = _euler_product(M)
    v, rnd = _series_value(coeffs, q, 0)
    pref = mpmath.expjpi(w.to_mpc() / 12)  # q^(1/24)
    val = pref * v
    return CertifiedComplex(val, abs(pref) * (rnd + mpmath.mpf(tail(M, absq))) + abs(val) * mpmath.ldexp(1, 3 - mpmath.mp.prec))


def dedekind_sum(h: int, k: int) -> Fraction:
    """s(h, k) = sum_{r=1}^{k-1} (r/k)(hr/k - floor(hr/k) - 1/2), k >= 1."""
    s = Fraction(0)
    for r in range(1, k):
        x = Fraction(h * r, k)
        s += Fraction(r, k) * (x - math.floor(x) - Fraction(1, 2))
    return s


def eta_multiplier(g) -> tuple[Fraction, bool]:
    """(e, flip) with eta(g tau) = exp(pi i e) sqrt(-i (c tau + d)) eta(tau) for c > 0.

    For c = 0 (g = T^b) returns e = b/12; ``flip`` tells whether g was replaced by -g.
    """
    (a, b), (c, d) = g
    flip = False
    if c < 0 or (c == 0 and d < 0):
        a, b, c, d = -a, -b, -c, -d
        flip = True
    if c == 0:
        return Fraction(b, 12), flip
    return Fraction(a + d, 12 * c) - dedekind_sum(d, c), flip


def _atom_value(atom: Atom, tau: CMPoint, target_log2: float) -> CertifiedComplex:
    z = tau.scale(atom.scale)
    w, g = reduce_point(z)  # w = g.z
    if atom.name in ("j", "J"):
        v = _j_at_reduced(w, target_log2)
        return v - 744 if atom.name == "J" else v
    if atom.name == "Jm":
        poly = faber_polynomial(atom.m)
        # polynomial in j loses bits proportional to its degree
        jv = _j_at_reduced(w, target_log2 - 40 * atom.m)
        out = CertifiedComplex.exact(0)
        for c in reversed(poly):
            out = out * jv + c
        return out
    (a, b), (c, d) = g
    cz = CertifiedComplex.exact(c * z.to_mpc() + d)
    if atom.name in ("E4", "E6"):
        k = int(atom.name[1])
        ew = _eis_at_reduced(k, w, target_log2 - 4 * k)
        # E_k(g z) = (c z + d)^k E_k(z)
        return ew / (cz ** k)
    if atom.name == "eta":
        ew = _eta_at_reduced(w, target_log2 - 4)
        e, flip = eta_multiplier(g)
        if flip:
            c, d = -c, -d
        if c == 0:
            # eta(z + b) = e(b/24) eta(z)  with  w = z + b
            mult = mpmath.expjpi(mpmath.mpf(e.numerator) / e.denominator)
            return ew / CertifiedComplex.exact(mult)
        mult = mpmath.expjpi(mpmath.mpf(e.numerator) / e.denominator)
        root = mpmath.sqrt(-1j * (c * z.to_mpc() + d))
        return ew / CertifiedComplex.exact(mult * root)
    raise ValueError(f"unknown atom {atom.name}")


def _eval_node(node, tau: CMPoint, target_log2: float, cache: dict) -> CertifiedComplex:
    if isinstance(node, Atom):
        if node not in cache:
            cache[node] = _atom_value(node, tau, target_log2)
        return cache[node]
    if isinstance(node, Const):
        return CertifiedComplex.exact(mpmath.mpf(node.value.numerator) / node.value.denominator)
    if isinstance(node, Neg):
        return -_eval_node(node.arg, tau, target_log2, cache)
    if isinstance(node, Pow):
        base = _eval_node(node.base, tau, target_log2 - 2 * abs(node.exp), cache)
        return base ** node.exp
    lhs = _eval_node(node.left, tau, target_log2, cache)
    rhs = _eval_node(node.right, tau, target_log2, cache)
    if node.op == "+":
        return lhs + rhs
    if node.op == "-":
        return lhs - rhs
    if node.op == "*":
        return lhs * rhs
    return lhs / rhs


def magnitude_bits(node, tau: CMPoint) -> int:
    """Rough log2 size of the atom values at tau (used to set working precision)."""
    worst = 0.0
    for a in atoms(node):
        w, _ = reduce_point(tau.scale(a.scale))
        y = math.sqrt(float(w.y2))
        pole = a.m if a.name == "Jm" else (1 if a.name in ("j", "J") else 0)
        worst = max(worst, 2 * math.pi * y * pole / math.log(2))
    return int(math.ceil(worst))


def eval_modfunc(f: ModFuncExpr | str, tau: CMPoint, bits: int = 64) -> CertifiedComplex:
    """Evaluate f at the CM point tau with absolute error about 2^-bits (certified bound)."""
    if isinstance(f, str):
        f = parse_modfunc(f)
    if tau.y2 <= 0:
        raise ValueError("tau must lie in the upper half plane")
    mag = magnitude_bits(f, tau)
    prec = bits + 32 + 2 * mag
    with mpmath.workprec(prec):
        val = _eval_node(f, tau, -(bits + 8), {})
    return val

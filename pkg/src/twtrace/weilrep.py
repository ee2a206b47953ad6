"""
Finite quadratic modules D(Delta) = L'/(Delta L), their Weil representations
on the generators S and T, the twisting map psi_{Delta,r} and the Gauss type
sums g_M^Delta(a, b; n).

Elements of D(Delta) are triples (a, b, c) standing for the dual-lattice
matrix (b/2N, -a/N; c, -b/2N), reduced to a mod |Delta|, b mod 2N|Delta|,
c mod |Delta|.  Its norm is Q(delta) = a c - b^2/4N and
Q_Delta = Q/|Delta|.
"""

from __future__ import annotations

import json
from fractions import Fraction

import mpmath
import numpy as np

from . import _accel
from .arith import is_fundamental, kronecker, sign, sqrts_mod_4N
from .genus import chi_lattice

LIMB_BITS = 30


class DiscModule:
    """The discriminant group D(Delta) of the level-N lattice, |D(Delta)| = 2N|Delta|^3."""

    def __init__(self, N: int, Delta: int = 1):
        if N < 1:
            raise ValueError("level must be positive")
        if not is_fundamental(Delta):
            raise ValueError(f"{Delta} is not a fundamental discriminant")
        self.N = N
        self.Delta = Delta
        self.abs_delta = abs(Delta)
        d = self.abs_delta
        self.elements = [(a, b, c) for a in range(d) for b in range(2 * N * d) for c in range(d)]
        self.index = {e: i for i, e in enumerate(self.elements)}
        assert len(self.elements) == 2 * N * d ** 3

    def __len__(self):
        return len(self.elements)

    @property
    def modulus(self) -> int:
        """Common denominator of the bilinear form values."""
        return 2 * self.N * self.abs_delta

    def reduce(self, a: int, b: int, c: int) -> tuple[int, int, int]:
        d = self.abs_delta
        return (a % d, b % (2 * self.N * d), c % d)

    def norm(self, e) -> Fraction:
        """Q_Delta(e) modulo 1, in [0, 1)."""
        a, b, c = e
        q = Fraction(4 * self.N * a * c - b * b, 4 * self.N * self.abs_delta)
        return q - (q.numerator // q.denominator)

    def pairing_numerator(self, e, f) -> int:
        """k with (e, f)_Delta = k / modulus (mod 1)."""
        a1, b1, c1 = e
        a2, b2, c2 = f
        return (2 * self.N * (a1 * c2 + a2 * c1) - b1 * b2) % self.modulus

    def project(self, e) -> int:
        """Canonical projection D(Delta) -> D = Z/2NZ."""
        return e[1] % (2 * self.N)

    def chi(self, e) -> int:
        return chi_lattice(self.Delta, self.N, *e)


def _e(x: Fraction, ctx=mpmath.mp):
    """exp(2 pi i x) for rational x."""
    x = x - (x.numerator // x.denominator)
    return ctx.expjpi(2 * ctx.mpf(x.numerator) / x.denominator)


def level_norm(N: int, h: int) -> Fraction:
    """Q(h) = -h^2/4N modulo 1 on D = Z/2NZ."""
    q = Fraction(-h * h, 4 * N)
    return q - (q.numerator // q.denominator)


def rho_T(N: int, Delta: int = 1, bits: int = 128) -> mpmath.matrix:
    mod = DiscModule(N, Delta)
    with mpmath.workprec(bits):
        M = mpmath.zeros(len(mod))
        for i, e in enumerate(mod.elements):
            M[i, i] = _e(mod.norm(e))
    return M


def rho_S(N: int, Delta: int = 1, bits: int = 128) -> mpmath.matrix:
    """Dense S-matrix (sqrt(i)/sqrt|D(Delta)|) e(-(delta', delta)); desk-size modules only."""
    mod = DiscModule(N, Delta)
    n = len(mod)
    with mpmath.workprec(bits):
        table = [_e(Fraction(-k, mod.modulus)) for k in range(mod.modulus)]
        pref = mpmath.sqrt(mpmath.mpc(0, 1)) / mpmath.sqrt(n)
        M = mpmath.zeros(n)
        for i, e in enumerate(mod.elements):
            for j, f in enumerate(mod.elements):
                M[i, j] = pref * table[mod.pairing_numerator(e, f)]
    return M


def psi_matrix(N: int, Delta: int, r: int) -> np.ndarray:
    """Integer matrix of psi_{Delta,r}: rows D(Delta), columns h in Z/2NZ."""
    if r % (2 * N) not in sqrts_mod_4N(Delta, N):
        raise ValueError(f"r={r} is not a square root of {Delta} mod {4 * N}")
    mod = DiscModule(N, Delta)
    out = np.zeros((len(mod), 2 * N), dtype=np.int64)
    s = sign(Delta)
    for h in range(2 * N):
        target = (s * level_norm(N, h)) % 1
        rh = (r * h) % (2 * N)
        for i, e in enumerate(mod.elements):
            if e[1] % (2 * N) != rh:
                continue
            if mod.norm(e) != target:
                continue
            out[i, h] = mod.chi(e)
    return out


def _to_limbs(x: int, nlimbs: int) -> list[int]:
    neg = x < 0
    x = -x if neg else x
    mask = (1 << LIMB_BITS) - 1
    limbs = [(x >> (LIMB_BITS * t)) & mask for t in range(nlimbs)]
    if x >> (LIMB_BITS * nlimbs):
        raise OverflowError("value exceeds limb capacity")
    return [-v for v in limbs] if neg else limbs


def _from_limbs(limbs) -> int:
    return sum(int(v) << (LIMB_BITS * t) for t, v in enumerate(limbs))


def s_action_on_psi(N: int, Delta: int, r: int, bits: int = 128, psi: np.ndarray | None = None):
    """rho_Delta(S) applied to every column of psi_{Delta,r}, in fixed point.

    Returns (mod, psi, X) with X[i][h] the mpc entry of rho_Delta(S) psi.
    The character sums are accumulated exactly on integer images of the
    roots of unity (scaled by 2^bits), so rounding happens only in the
    table entries and in the final scaling.
    """
    mod = DiscModule(N, Delta)
    if psi is None:
        psi = psi_matrix(N, Delta, r)
    ncols = psi.shape[1]
    supp, signs, col_ptr = [], [], [0]
    for h in range(ncols):
        rows = np.nonzero(psi[:, h])[0]
        for i in rows:
            supp.append(mod.elements[i])
            signs.append(int(psi[i, h]))
        col_ptr.append(len(supp))
    M = mod.modulus
    nlimbs = bits // LIMB_BITS + 2
    scale = 1 << bits
    with mpmath.workprec(bits + 20):
        re_t, im_t = [], []
        for k in range(M):
            z = _e(Fraction(-k, M))
            re_t.append(_to_limbs(int(mpmath.nint(z.real * scale)), nlimbs))
            im_t.append(_to_limbs(int(mpmath.nint(z.imag * scale)), nlimbs))
    limbs_re = np.array(re_t, dtype=np.int64).reshape(M, nlimbs)
    limbs_im = np.array(im_t, dtype=np.int64).reshape(M, nlimbs)
    elems = np.array(mod.elements, dtype=np.int64).reshape(len(mod), 3)
    supp_a = np.array(supp, dtype=np.int64).reshape(len(supp), 3)
    out_re, out_im = _accel.pairing_sums(elems, supp_a, np.array(signs, dtype=np.int64),
                                         np.array(col_ptr, dtype=np.int64), 2 * N, M,
                                         limbs_re, limbs_im)
    X = []
    with mpmath.workprec(bits + 20):
        pref = mpmath.sqrt(mpmath.mpc(0, 1)) / mpmath.sqrt(len(mod)) / scale
        for i in range(len(mod)):
            row = []
            for h in range(ncols):
                re = _from_limbs(out_re[i, h])
                im = _from_limbs(out_im[i, h])
                row.append(pref * mpmath.mpc(re, im) if (re or im) else mpmath.mpc(0))
            X.append(row)
    return mod, psi, X


def verify_intertwining(N: int, Delta: int, r: int, bits: int = 128) -> float:
    """max over g in {S, T} of || rho_Delta(g) psi - psi rho~(g) ||_inf.

    rho~ is the level-N Weil representation, complex conjugated when Delta < 0.
    """
    with mpmath.workprec(bits):
        mod, psi, X = s_action_on_psi(N, Delta, r, bits)
    ncols = 2 * N
    conj = Delta < 0
    worst = mpmath.mpf(0)
    with mpmath.workprec(bits + 20):
        sqrt_i = mpmath.sqrt(mpmath.mpc(0, 1))
        pref = (mpmath.conj(sqrt_i) if conj else sqrt_i) / mpmath.sqrt(2 * N)
        S_level = [[pref * _e(Fraction(hp * h * (-1 if conj else 1), 2 * N)) for h in range(ncols)]
                   for hp in range(ncols)]
        for i, e in enumerate(mod.elements):
            prow = psi[i]
            nz = [hp for hp in range(ncols) if prow[hp]]
            for h in range(ncols):
                y = mpmath.fsum((int(prow[hp]) * S_level[hp][h] for hp in nz)) if nz else 0
                d = abs(X[i][h] - y)
                if d > worst:
                    worst = d
            # T: diagonal phases agree exactly on the support by construction
            for h in nz:
                lhs = _e(mod.norm(e))
                rhs = _e((sign(Delta) * level_norm(N, h)) % 1)
                d = abs(lhs - rhs)
                if d > worst:
                    worst = d
    return float(worst) if worst > 0 else 0.0


def unitarity_residual(M: mpmath.matrix, bits: int = 128) -> mpmath.mpf:
    with mpmath.workprec(bits):
        n = M.rows
        P = M * M.transpose_conj()
        return max(abs(P[i, j] - (1 if i == j else 0)) for i in range(n) for j in range(n))


def metaplectic_residual(N: int, Delta: int = 1, bits: int = 128) -> mpmath.mpf:
    """|| (S T)^3 - S^2 ||_inf for the Weil representation of D(Delta)."""
    with mpmath.workprec(bits):
        S = rho_S(N, Delta, bits)
        T = rho_T(N, Delta, bits)
        ST = S * T
        lhs = ST * ST * ST
        rhs = S * S
        n = S.rows
        return max(abs(lhs[i, j] - rhs[i, j]) for i in range(n) for j in range(n))


def matrix_to_json(M: mpmath.matrix, digits: int = 40) -> str:
    rows = [[[mpmath.nstr(mpmath.re(M[i, j]), digits), mpmath.nstr(mpmath.im(M[i, j]), digits)]
             for j in range(M.cols)] for i in range(M.rows)]
    return json.dumps(rows)


# ---------------------------------------------------------------------------
# Gauss type sums


def _epsilon(Delta: int):
    return mpmath.mpc(1) if Delta > 0 else mpmath.mpc(0, 1)


def gauss_sum_direct(Delta: int, M: int, a: int, b: int, n: int):
    """sum_{j mod M} (Delta/(a j + b)) e(j n / M) by direct summation."""
    if M <= 0 or M % Delta:
        raise ValueError("need M > 0 and Delta | M")
    return mpmath.fsum(kronecker(Delta, a * j + b) * _e(Fraction(j * n, M)) for j in range(M))


def gauss_sum(Delta: int, M: int, a: int, b: int, n: int):
    """Closed form: zero unless (M/|Delta|) | n, else
    eps^-1 M/sqrt|Delta| sum_{l mod Delta, a l + n' = 0 (Delta)} (Delta/l) e(b l/|Delta|),
    with n' = |Delta| n / M and eps = 1 (Delta > 0), i (Delta < 0).
    """
    if M <= 0 or M % Delta:
        raise ValueError("need M > 0 and Delta | M")
    d = abs(Delta)
    step = M // d
    if n % step:
        return mpmath.mpc(0)
    n1 = n // step
    s = mpmath.fsum(kronecker(Delta, l) * _e(Fraction(b * l, d))
                    for l in range(d) if (a * l + n1) % d == 0)
    return s * M / (_epsilon(Delta) * mpmath.sqrt(d))

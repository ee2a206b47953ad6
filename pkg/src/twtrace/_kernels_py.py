"""Pure-Python versions of the hot kernels.

These define the reference behaviour; ``_kernels.pyx`` must agree with them
exactly (see tests/test_kernels.py).
"""

from __future__ import annotations

import numpy as np


def convolve(a: list, b: list) -> list:
    """Full schoolbook product of two coefficient lists (exact arithmetic)."""
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] += x * y
    return out


def convolve_trunc(a: list, b: list, n: int) -> list:
    """First n coefficients of the product of two coefficient lists."""
    if n <= 0:
        return []
    out = [0] * n
    lb = len(b)
    for i, x in enumerate(a[:n]):
        if not x:
            continue
        for j in range(min(lb, n - i)):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


def pairing_sums(elems, supp, signs, col_ptr, two_n, modulus, limbs_re, limbs_im):
    """Limb-wise sums  sum_s sign_s * table[k(e, s)]  for every element e and column.

    ``elems`` (E x 3) and ``supp`` (S x 3) hold (a, b, c) coset coordinates;
    the residue is k = (two_n*(a_e*c_s + a_s*c_e) - b_e*b_s) mod modulus.
    Columns are the slices ``supp[col_ptr[j]:col_ptr[j+1]]``.
    Returns two int64 arrays of shape (E, ncols, L).
    """
    elems = np.asarray(elems, dtype=np.int64)
    supp = np.asarray(supp, dtype=np.int64)
    E = elems.shape[0]
    ncols = len(col_ptr) - 1
    L = limbs_re.shape[1]
    out_re = np.zeros((E, ncols, L), dtype=np.int64)
    out_im = np.zeros((E, ncols, L), dtype=np.int64)
    lre = limbs_re.tolist()
    lim = limbs_im.tolist()
    el = elems.tolist()
    sp = supp.tolist()
    sg = list(signs)
    for col in range(ncols):
        lo, hi = col_ptr[col], col_ptr[col + 1]
        for e, (ae, be, ce) in enumerate(el):
            acc_re = [0] * L
            acc_im = [0] * L
            for s in range(lo, hi):
                a_s, b_s, c_s = sp[s]
                k = (two_n * (ae * c_s + a_s * ce) - be * b_s) % modulus
                w = sg[s]
                tr, ti = lre[k], lim[k]
                for t in range(L):
                    acc_re[t] += w * tr[t]
                    acc_im[t] += w * ti[t]
            out_re[e, col, :] = acc_re
            out_im[e, col, :] = acc_im
    return out_re, out_im

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=False
"""Compiled hot kernels; behaviour is defined by _kernels_py."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def convolve(list a, list b):
    cdef Py_ssize_t la = len(a), lb = len(b), i, j
    if la == 0 or lb == 0:
        return []
    cdef list out = [0] * (la + lb - 1)
    cdef object x, y
    for i in range(la):
        x = a[i]
        if not x:
            continue
        for j in range(lb):
            y = b[j]
            if y:
                out[i + j] = out[i + j] + x * y
    return out


def convolve_trunc(list a, list b, Py_ssize_t n):
    if n <= 0:
        return []
    cdef Py_ssize_t la = len(a), lb = len(b), i, j, top
    cdef list out = [0] * n
    cdef object x, y
    for i in range(min(la, n)):
        x = a[i]
        if not x:
            continue
        top = min(lb, n - i)
        for j in range(top):
            y = b[j]
            if y:
                out[i + j] = out[i + j] + x * y
    return out


cdef inline long long _pmod(long long x, long long m) nogil:
    cdef long long r = x % m
    if r < 0:
        r += m
    return r


def pairing_sums(elems, supp, signs, col_ptr, long long two_n, long long modulus,
                 limbs_re, limbs_im):
    cdef cnp.int64_t[:, :] el = np.ascontiguousarray(elems, dtype=np.int64)
    cdef cnp.int64_t[:, :] sp = np.ascontiguousarray(supp, dtype=np.int64)
    cdef cnp.int64_t[:] sg = np.ascontiguousarray(signs, dtype=np.int64)
    cdef cnp.int64_t[:] cp = np.ascontiguousarray(col_ptr, dtype=np.int64)
    cdef cnp.int64_t[:, :] lre = np.ascontiguousarray(limbs_re, dtype=np.int64)
    cdef cnp.int64_t[:, :] lim = np.ascontiguousarray(limbs_im, dtype=np.int64)
    cdef Py_ssize_t E = el.shape[0], ncols = cp.shape[0] - 1, L = lre.shape[1]
    out_re_a = np.zeros((E, ncols, L), dtype=np.int64)
    out_im_a = np.zeros((E, ncols, L), dtype=np.int64)
    cdef cnp.int64_t[:, :, :] ore = out_re_a
    cdef cnp.int64_t[:, :, :] oim = out_im_a
    cdef Py_ssize_t col, e, s, t
    cdef long long ae, be, ce, k, w
    with nogil:
        for col in range(ncols):
            for e in range(E):
                ae = el[e, 0]
                be = el[e, 1]
                ce = el[e, 2]
                for s in range(cp[col], cp[col + 1]):
                    k = _pmod(two_n * (ae * sp[s, 2] + sp[s, 0] * ce) - be * sp[s, 1], modulus)
                    w = sg[s]
                    for t in range(L):
                        ore[e, col, t] += w * lre[k, t]
                        oim[e, col, t] += w * lim[k, t]
    return out_re_a, out_im_a

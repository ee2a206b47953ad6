"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Both backends are imported directly, so the environment switch is not needed.
Results are checked for equality before timings are reported.
"""

import argparse
import random
import time

import mpmath
import numpy as np

from twtrace import _kernels_py
from twtrace.weilrep import DiscModule, psi_matrix

try:
    from twtrace import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def convolution_case(n, seed=1):
    rng = random.Random(seed)
    a = [rng.randint(-10**12, 10**12) for _ in range(n)]
    b = [rng.randint(-10**12, 10**12) for _ in range(n)]
    return a, b


def pairing_case(N, Delta, r, bits=128):
    # same inputs s_action_on_psi builds
    from fractions import Fraction

    from twtrace.weilrep import LIMB_BITS, _e, _to_limbs

    mod = DiscModule(N, Delta)
    psi = psi_matrix(N, Delta, r)
    supp, signs, col_ptr = [], [], [0]
    for h in range(psi.shape[1]):
        for i in np.nonzero(psi[:, h])[0]:
            supp.append(mod.elements[i])
            signs.append(int(psi[i, h]))
        col_ptr.append(len(supp))
    M = mod.modulus
    nlimbs = bits // LIMB_BITS + 2
    scale = 1 << bits
    re_t, im_t = [], []
    with mpmath.workprec(bits + 20):
        for k in range(M):
            z = _e(Fraction(-k, M))
            re_t.append(_to_limbs(int(mpmath.nint(z.real * scale)), nlimbs))
            im_t.append(_to_limbs(int(mpmath.nint(z.imag * scale)), nlimbs))
    return (np.array(mod.elements, dtype=np.int64), np.array(supp, dtype=np.int64).reshape(-1, 3),
            np.array(signs, dtype=np.int64), np.array(col_ptr, dtype=np.int64), 2 * N, M,
            np.array(re_t, dtype=np.int64), np.array(im_t, dtype=np.int64))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")
        return
    rows = []
    for n in (200, 800):
        a, b = convolution_case(n)
        tp, rp = best_of(lambda: _kernels_py.convolve(a, b), args.repeat)
        tc, rc = best_of(lambda: _kernels.convolve(a, b), args.repeat)
        assert rp == rc
        rows.append((f"convolve n={n}", tp, tc))
        tp, rp = best_of(lambda: _kernels_py.convolve_trunc(a, b, n // 2), args.repeat)
        tc, rc = best_of(lambda: _kernels.convolve_trunc(a, b, n // 2), args.repeat)
        assert rp == rc
        rows.append((f"convolve_trunc n={n}", tp, tc))
    for N, Delta, r in ((1, 5, 1), (11, 5, 7)):
        case = pairing_case(N, Delta, r)
        tp, rp = best_of(lambda: _kernels_py.pairing_sums(*case), 1)
        tc, rc = best_of(lambda: _kernels.pairing_sums(*case), args.repeat)
        assert all(np.array_equal(x, y) for x, y in zip(rp, rc))
        rows.append((f"pairing_sums ({N},{Delta},{r})", tp, tc))
    print(f"{'kernel':32s} {'python [s]':>12s} {'cython [s]':>12s} {'speedup':>9s}")
    for name, tp, tc in rows:
        print(f"{name:32s} {tp:12.4f} {tc:12.4f} {tp / tc:9.1f}")


if __name__ == "__main__":
    main()

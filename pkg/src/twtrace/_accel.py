"""Select the compiled kernels when available, else the pure-Python ones.

Set ``TWTRACE_PURE=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
kernels = _kernels_py

if not os.environ.get("TWTRACE_PURE"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        kernels = _compiled
        BACKEND = "cython"

convolve = kernels.convolve
convolve_trunc = kernels.convolve_trunc
pairing_sums = kernels.pairing_sums

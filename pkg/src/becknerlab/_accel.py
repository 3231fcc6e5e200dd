"""Optional numba acceleration.

Setting ``BECKNERLAB_DISABLE_NUMBA=1`` (or running without numba installed)
selects the pure-numpy kernels. The choice is made once at import.
"""

import os

DISABLE_ENV = "BECKNERLAB_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get(DISABLE_ENV, "").strip().lower() not in ("1", "true", "yes")


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise the identity decorator."""
    if NUMBA_AVAILABLE:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


def backend():
    return "numba" if USE_NUMBA else "numpy"

"""Backend switch for the hot kernels.

Set ``SKELGCN_DISABLE_NUMBA=1`` before import to force the pure-numpy path.
"""
import os

_FALSEY = ("", "0", "false", "no", "off")

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("SKELGCN_DISABLE_NUMBA", "").lower() in _FALSEY


def njit(func):
    """``numba.njit`` with the package's options, or identity without numba."""
    if not NUMBA_AVAILABLE:  # pragma: no cover
        return func
    # fastmath stays off: both backends must round identically
    return numba.njit(cache=True, nogil=True)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"

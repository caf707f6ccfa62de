"""Optional numba acceleration.

Set PDMOSC_DISABLE_NUMBA=1 to force the pure-numpy code paths.
"""
import os

DISABLED = os.environ.get("PDMOSC_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if DISABLED:
        raise ImportError("numba disabled by environment")
    from numba import njit as _njit
    HAVE_NUMBA = True
except ImportError:
    _njit = None
    HAVE_NUMBA = False


def jit(fn):
    """Compile `fn` with numba when available, otherwise return None."""
    if not HAVE_NUMBA:
        return None
    return _njit(cache=True, nogil=True)(fn)


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"

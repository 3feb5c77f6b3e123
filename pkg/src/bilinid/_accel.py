"""Optional numba acceleration.

Kernels are written once in a numba-compatible subset of numpy. When numba is
importable and ``BILINID_DISABLE_NUMBA`` is unset (or ``0``), they are compiled
with ``njit``; otherwise the very same functions run under CPython. The choice
is made once, at import time.
"""
import logging
import os

logger = logging.getLogger(__name__)

_DISABLED = os.environ.get("BILINID_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("disabled by BILINID_DISABLE_NUMBA")
    import numba

    HAVE_NUMBA = True
except ImportError as exc:  # pragma: no cover - depends on environment
    numba = None
    HAVE_NUMBA = False
    logger.debug("numba unavailable, using pure numpy kernels: %s", exc)


def jit(func):
    """``numba.njit`` when acceleration is on, identity otherwise."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def backend():
    return "numba" if HAVE_NUMBA else "numpy"

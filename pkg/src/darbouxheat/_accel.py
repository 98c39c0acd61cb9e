"""Numba switch.

Hot loops live in :mod:`darbouxheat._kernels` in two flavours: an ``@njit``
version and a plain numpy/scipy version.  Which one is exported is decided
once at import time:

* ``DARBOUXHEAT_NUMBA=0`` (or ``false``/``no``/``off``) forces numpy,
* otherwise numba is used when it can be imported.
"""
import os

_FALSY = {"0", "false", "no", "off"}

USE_NUMBA = os.environ.get("DARBOUXHEAT_NUMBA", "1").strip().lower() not in _FALSY

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False
else:
    HAVE_NUMBA = True

USE_NUMBA = USE_NUMBA and HAVE_NUMBA


def njit(func):
    """``numba.njit(cache=True)`` if numba is importable, else identity."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True)(func)
